#include "epl/types.hpp"

#include "epl/common.hpp"

#include <algorithm>

namespace epl {

LevelVector::LevelVector(std::vector<int> levels) : levels_(std::move(levels))
{
    for (int v : levels_)
        if (v < 0 || v >= kNumLevels)
            throw InputError("level " + std::to_string(v) + " outside [0, 15]");
}

void LevelVector::set(std::size_t i, int level)
{
    if (level < 0 || level >= kNumLevels)
        throw InputError("level " + std::to_string(level) + " outside [0, 15]");
    levels_.at(i) = level;
}

std::size_t LevelVector::count_nonzero() const
{
    return static_cast<std::size_t>(std::count_if(levels_.begin(), levels_.end(), [](int v) { return v != 0; }));
}

SpikeSet::SpikeSet(std::initializer_list<Spike> spikes) : SpikeSet(std::vector<Spike>(spikes)) {}

SpikeSet::SpikeSet(std::vector<Spike> spikes) : spikes_(std::move(spikes))
{
    std::sort(spikes_.begin(), spikes_.end());
    for (std::size_t i = 1; i < spikes_.size(); ++i)
        if (spikes_[i].mc == spikes_[i - 1].mc)
            throw InputError("MC " + std::to_string(spikes_[i].mc) + " spikes twice in one cycle");
}

void SpikeSet::push_back_ordered(Spike s)
{
    if (!spikes_.empty() && spikes_.back().mc >= s.mc)
        throw ContractError("spike set insertion out of MC order");
    spikes_.push_back(s);
}

bool SpikeSet::contains(Spike s) const
{
    return std::binary_search(spikes_.begin(), spikes_.end(), s);
}

std::size_t SniffResponse::total_spikes() const
{
    std::size_t n = 0;
    for (const auto& c : cycles)
        n += c.size();
    return n;
}

} // namespace epl
