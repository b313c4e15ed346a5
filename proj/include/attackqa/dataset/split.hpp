#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/qa/pair.hpp"

namespace attackqa {

inline constexpr double kDefaultEvalFraction = 0.10;

struct SplitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Split {
    std::vector<QAPair> train;
    std::vector<QAPair> eval;
    std::uint64_t seed = 0;
    double eval_fraction = kDefaultEvalFraction;
    std::size_t swaps = 0;              // repair swaps between eval and train
    std::size_t conflicts = 0;          // orphaned documents fixed by shrinking eval
    std::size_t question_moves = 0;     // eval pairs moved to train for sharing a question
    ordered_json header() const;
};

/// Uniform sample of floor(n * eval_fraction) eval pairs, then a repair pass:
/// every document whose pairs all landed in eval gets one of them swapped with
/// a train pair whose document keeps another train pair. When no such partner
/// exists the pair moves to train and eval shrinks. Eval pairs whose question
/// also occurs in train move to train. Throws SplitError under 10 pairs.
Split split_train_eval(const std::vector<QAPair>& pairs, std::uint64_t seed,
                       double eval_fraction = kDefaultEvalFraction);

}  // namespace attackqa
