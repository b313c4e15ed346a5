#include "attackqa/dataset/split.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "attackqa/common/rng.hpp"

namespace attackqa {

ordered_json Split::header() const {
    ordered_json h;
    h["seed"] = seed;
    h["eval_fraction"] = eval_fraction;
    h["train"] = train.size();
    h["eval"] = eval.size();
    h["swaps"] = swaps;
    h["conflicts"] = conflicts;
    h["question_moves"] = question_moves;
    return h;
}

Split split_train_eval(const std::vector<QAPair>& pairs, std::uint64_t seed,
                       double eval_fraction) {
    if (pairs.size() < 10) throw SplitError("dataset too small to split");
    if (eval_fraction < 0.0 || eval_fraction >= 1.0) {
        throw SplitError("eval_fraction must be in [0, 1)");
    }
    const std::size_t n = pairs.size();
    const auto n_eval = static_cast<std::size_t>(std::floor(static_cast<double>(n) * eval_fraction));

    DetRng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<bool> in_eval(n, false);
    for (std::size_t i = 0; i < n_eval; ++i) in_eval[order[i]] = true;

    Split out;
    out.seed = seed;
    out.eval_fraction = eval_fraction;

    // Documents in first-appearance order keep the repair pass deterministic.
    std::vector<std::string> doc_order;
    std::unordered_map<std::string, std::vector<std::size_t>> by_doc;
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = by_doc.try_emplace(pairs[i].document);
        if (inserted) doc_order.push_back(pairs[i].document);
        it->second.push_back(i);
    }
    std::unordered_map<std::string, std::size_t> train_count;
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_eval[i]) ++train_count[pairs[i].document];
    }

    for (const auto& doc : doc_order) {
        if (train_count[doc] > 0) continue;
        const auto& members = by_doc[doc];
        const auto moving = members[rng.below(members.size())];
        std::vector<std::size_t> partners;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_eval[i] && train_count[pairs[i].document] >= 2) partners.push_back(i);
        }
        in_eval[moving] = false;
        ++train_count[doc];
        if (partners.empty()) {
            ++out.conflicts;
            continue;
        }
        const auto partner = partners[rng.below(partners.size())];
        in_eval[partner] = true;
        --train_count[pairs[partner].document];
        ++out.swaps;
    }

    std::unordered_set<std::string> train_questions;
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_eval[i]) train_questions.insert(pairs[i].question);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (in_eval[i] && train_questions.count(pairs[i].question)) {
            in_eval[i] = false;
            ++out.question_moves;
        }
    }

    for (std::size_t i = 0; i < n; ++i) (in_eval[i] ? out.eval : out.train).push_back(pairs[i]);
    return out;
}

}  // namespace attackqa
