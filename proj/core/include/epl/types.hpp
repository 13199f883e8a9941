#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace epl {

inline constexpr int kNumLevels = 16;
inline constexpr int kDefaultColumns = 72;

/// Discretized sensor activation, one level in [0, kNumLevels) per column.
class LevelVector {
public:
    LevelVector() = default;
    explicit LevelVector(std::size_t columns) : levels_(columns, 0) {}
    explicit LevelVector(std::vector<int> levels);
    LevelVector(std::initializer_list<int> levels) : LevelVector(std::vector<int>(levels)) {}

    std::size_t size() const { return levels_.size(); }
    int operator[](std::size_t i) const { return levels_[i]; }
    void set(std::size_t i, int level);

    std::span<const int> values() const { return levels_; }
    std::size_t count_nonzero() const;

    friend bool operator==(const LevelVector&, const LevelVector&) = default;

private:
    std::vector<int> levels_;
};

struct Spike {
    std::uint32_t mc = 0;
    std::int32_t ts = 0; // timestep within the permissive epoch

    friend auto operator<=>(const Spike&, const Spike&) = default;
};

/// MC spikes of one gamma cycle, kept sorted by (mc, ts). Each MC appears at
/// most once.
class SpikeSet {
public:
    SpikeSet() = default;
    SpikeSet(std::initializer_list<Spike> spikes);
    explicit SpikeSet(std::vector<Spike> spikes);

    /// Appends a spike; `mc` must exceed every MC already present.
    void push_back_ordered(Spike s);

    std::size_t size() const { return spikes_.size(); }
    bool empty() const { return spikes_.empty(); }
    std::span<const Spike> spikes() const { return spikes_; }
    auto begin() const { return spikes_.begin(); }
    auto end() const { return spikes_.end(); }
    bool contains(Spike s) const;

    friend bool operator==(const SpikeSet&, const SpikeSet&) = default;

private:
    std::vector<Spike> spikes_;
};

/// Per-gamma-cycle MC spike sets for one sniff, in cycle order.
struct SniffResponse {
    std::vector<SpikeSet> cycles;

    const SpikeSet& last() const { return cycles.back(); }
    std::size_t total_spikes() const;

    friend bool operator==(const SniffResponse&, const SniffResponse&) = default;
};

} // namespace epl
