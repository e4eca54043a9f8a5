#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace crb {

/// Process identifier: dense index into the process universe.
using ProcessId = int;

/// Small set of processes backed by a 64-bit mask. The whole toolkit
/// assumes |Pi| <= 64; trust configs are rejected beyond that.
class ProcSet {
public:
    constexpr ProcSet() = default;
    constexpr explicit ProcSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr ProcSet single(ProcessId p) { return ProcSet(std::uint64_t{1} << p); }
    static constexpr ProcSet full(int n)
    {
        return ProcSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int count() const { return std::popcount(bits_); }

    constexpr bool contains(ProcessId p) const { return (bits_ >> p) & 1; }
    constexpr bool subset_of(ProcSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(ProcSet o) const { return (bits_ & o.bits_) != 0; }

    constexpr void add(ProcessId p) { bits_ |= std::uint64_t{1} << p; }
    constexpr void remove(ProcessId p) { bits_ &= ~(std::uint64_t{1} << p); }

    constexpr ProcSet operator&(ProcSet o) const { return ProcSet(bits_ & o.bits_); }
    constexpr ProcSet operator|(ProcSet o) const { return ProcSet(bits_ | o.bits_); }
    constexpr ProcSet operator-(ProcSet o) const { return ProcSet(bits_ & ~o.bits_); }
    constexpr ProcSet& operator|=(ProcSet o) { bits_ |= o.bits_; return *this; }
    constexpr ProcSet& operator&=(ProcSet o) { bits_ &= o.bits_; return *this; }

    constexpr bool operator==(const ProcSet&) const = default;

    /// Lowest member, or -1 when empty.
    constexpr ProcessId first() const
    {
        return bits_ == 0 ? -1 : std::countr_zero(bits_);
    }

    std::vector<ProcessId> members() const
    {
        std::vector<ProcessId> out;
        out.reserve(static_cast<std::size_t>(count()));
        for (std::uint64_t b = bits_; b != 0; b &= b - 1)
            out.push_back(std::countr_zero(b));
        return out;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const
    {
        for (std::uint64_t b = bits_; b != 0; b &= b - 1)
            fn(static_cast<ProcessId>(std::countr_zero(b)));
    }

private:
    std::uint64_t bits_ = 0;
};

/// Canonical ordering for reproducible enumeration: smaller sets first,
/// ties broken lexicographically on the sorted member list.
inline bool set_order_less(ProcSet a, ProcSet b)
{
    if (a.count() != b.count())
        return a.count() < b.count();
    std::uint64_t x = a.bits(), y = b.bits();
    while (x != 0 && y != 0) {
        int px = std::countr_zero(x), py = std::countr_zero(y);
        if (px != py)
            return px < py;
        x &= x - 1;
        y &= y - 1;
    }
    return x == 0 && y != 0;
}

inline std::string set_to_string(ProcSet s, const std::vector<std::string>& labels)
{
    std::string out = "{";
    bool sep = false;
    s.for_each([&](ProcessId p) {
        if (sep)
            out += ",";
        sep = true;
        out += (p < static_cast<int>(labels.size())) ? labels[p] : ("#" + std::to_string(p));
    });
    out += "}";
    return out;
}

} // namespace crb
