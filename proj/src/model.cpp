#include "tracelab/model.hpp"

#include <algorithm>
#include <numeric>

namespace tracelab {

BiasVector::BiasVector(std::vector<double> values) : values_(std::move(values)) {
    require(!values_.empty(), "bias vector length must be >= 1");
    for (double p : values_) {
        require(p > 0.0 && p < 1.0, "bias entry at boundary: every entry must lie strictly in (0,1)");
    }
}

double BiasVector::at(std::size_t segment) const {
    require(segment >= 1 && segment <= values_.size(), "segment index out of range 1..length");
    return values_[segment - 1];
}

CodeMatrix::CodeMatrix(std::size_t users, std::size_t length)
    : users_(users), length_(length), bits_(users * length, 0) {
    require(users >= 1, "code must have at least one user");
    require(length >= 1, "code length must be >= 1");
}

CodeMatrix::CodeMatrix(std::size_t users, std::size_t length, std::vector<std::uint8_t> bits)
    : users_(users), length_(length), bits_(std::move(bits)) {
    require(users >= 1, "code must have at least one user");
    require(length >= 1, "code length must be >= 1");
    require(bits_.size() == users * length, "dimension mismatch: bit count != users * length");
    require(std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b <= 1; }),
            "code entries must be 0 or 1");
}

int CodeMatrix::bit(std::size_t user, std::size_t segment) const {
    require(user < users_, "user index out of range");
    require(segment >= 1 && segment <= length_, "segment index out of range 1..length");
    return bits_[user * length_ + segment - 1];
}

void CodeMatrix::set(std::size_t user, std::size_t segment, int value) {
    require(user < users_, "user index out of range");
    require(segment >= 1 && segment <= length_, "segment index out of range 1..length");
    require(value == 0 || value == 1, "code entries must be 0 or 1");
    bits_[user * length_ + segment - 1] = static_cast<std::uint8_t>(value);
}

std::span<const std::uint8_t> CodeMatrix::row(std::size_t user) const {
    require(user < users_, "user index out of range");
    return std::span<const std::uint8_t>(bits_).subspan(user * length_, length_);
}

CodeMatrix CodeMatrix::without_user(std::size_t user) const {
    require(user < users_, "user index out of range");
    require(users_ >= 2, "cannot remove the only user");
    std::vector<std::uint8_t> kept;
    kept.reserve((users_ - 1) * length_);
    for (std::size_t j = 0; j < users_; ++j) {
        if (j == user) continue;
        auto r = row(j);
        kept.insert(kept.end(), r.begin(), r.end());
    }
    return CodeMatrix(users_ - 1, length_, std::move(kept));
}

bool CoalitionSpec::contains(std::size_t user) const noexcept {
    return std::find(members.begin(), members.end(), user) != members.end();
}

void validate_instance(const BiasVector& bias, const CodeMatrix& code, const CoalitionSpec& coalition) {
    require(code.length() == bias.length(), "dimension mismatch: code length != bias length");
    for (double p : bias.values()) {
        require(p > 0.0 && p < 1.0, "bias entry at boundary: every entry must lie strictly in (0,1)");
    }
    const std::size_t c = coalition.size();
    require(c >= 1, "coalition must have at least one member");
    require(c <= coalition.c0, "coalition size c exceeds decoder bound c0");
    require(coalition.c0 <= code.users(), "decoder bound c0 exceeds user count n");
    for (std::size_t m : coalition.members) {
        require(m < code.users(), "coalition index out of range");
    }
    std::vector<std::size_t> sorted = coalition.members;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "coalition members must be distinct");
}

const char* to_string(UserStatus status) noexcept {
    switch (status) {
        case UserStatus::active: return "active";
        case UserStatus::accused: return "accused";
        case UserStatus::acquitted: return "acquitted";
        case UserStatus::certainly_innocent: return "certainly_innocent";
    }
    return "unknown";
}

void UserState::settle(UserStatus terminal, std::size_t segment) {
    if (status != UserStatus::active) {
        throw std::logic_error("user already has a terminal status");
    }
    require(terminal != UserStatus::active, "settle requires a terminal status");
    status = terminal;
    decided_at = segment;
}

double OvershootStats::sum() const noexcept {
    return std::accumulate(samples.begin(), samples.end(), 0.0);
}

double OvershootStats::mean() const noexcept {
    return samples.empty() ? 0.0 : sum() / static_cast<double>(samples.size());
}

}  // namespace tracelab
