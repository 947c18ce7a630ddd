#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracelab {

/// Thrown whenever an operation's precondition is violated. The message
/// names the violated condition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& what) {
    if (!condition) throw PreconditionError(what);
}

// Segment indices are 1-based throughout (i in 1..length). User indices are
// 0-based row indices into the code.

/// Per-segment probabilities of emitting a 1, each strictly inside (0, 1).
class BiasVector {
public:
    explicit BiasVector(std::vector<double> values);

    std::size_t length() const noexcept { return values_.size(); }
    /// Bias of a 1-based segment.
    double at(std::size_t segment) const;
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const BiasVector&, const BiasVector&) = default;

private:
    std::vector<double> values_;
};

/// n binary codewords of equal length, stored row-major.
class CodeMatrix {
public:
    CodeMatrix(std::size_t users, std::size_t length);
    CodeMatrix(std::size_t users, std::size_t length, std::vector<std::uint8_t> bits);

    std::size_t users() const noexcept { return users_; }
    std::size_t length() const noexcept { return length_; }

    int bit(std::size_t user, std::size_t segment) const;
    void set(std::size_t user, std::size_t segment, int value);
    std::span<const std::uint8_t> row(std::size_t user) const;

    /// Copy with one row removed, as happens when a user is disconnected.
    CodeMatrix without_user(std::size_t user) const;

    friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;

private:
    std::size_t users_;
    std::size_t length_;
    std::vector<std::uint8_t> bits_;
};

struct CoalitionSpec {
    std::vector<std::size_t> members;  ///< distinct user indices
    std::size_t c0 = 0;                ///< decoder's assumed upper bound on |members|

    std::size_t size() const noexcept { return members.size(); }
    bool contains(std::size_t user) const noexcept;
};

/// Throws PreconditionError unless bias, code and coalition are mutually consistent.
void validate_instance(const BiasVector& bias, const CodeMatrix& code, const CoalitionSpec& coalition);

enum class UserStatus { active, accused, acquitted, certainly_innocent };

const char* to_string(UserStatus status) noexcept;

/// Sequential state of one user within one trial.
struct UserState {
    double cumulative_score = 0.0;  // nats
    UserStatus status = UserStatus::active;
    std::size_t decided_at = 0;                            // segment of the terminal transition
    std::optional<std::size_t> disconnect_pending_until;   // last segment still contributing

    bool active() const noexcept { return status == UserStatus::active; }

    /// The single allowed transition out of `active`.
    void settle(UserStatus terminal, std::size_t segment);
};

struct OvershootStats {
    std::vector<double> samples;  // nats, one per boundary crossing

    void add(double overshoot) { samples.push_back(overshoot); }
    std::size_t count() const noexcept { return samples.size(); }
    double sum() const noexcept;
    double mean() const noexcept;  // 0 when empty

    friend bool operator==(const OvershootStats&, const OvershootStats&) = default;
};

}  // namespace tracelab
