// Weak transition closures for writers, shared by every reader-writer
// language in the library.
#pragma once

#include <deque>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rwsos {

enum class StepKind : std::uint8_t { Silent, Output, Done };

template <class W, class S>
struct Step {
    StepKind kind = StepKind::Silent;
    W next{};   // Silent and Output
    S state{};  // Output and Done

    static Step silent(W w) { return {StepKind::Silent, std::move(w), S{}}; }
    static Step output(W w, S s) { return {StepKind::Output, std::move(w), std::move(s)}; }
    static Step done(S s) { return {StepKind::Done, W{}, std::move(s)}; }
};

// Level one respects emitted states: only silent steps are absorbed.
// Level two absorbs emitting steps as well.
enum class Level { One, Two };

inline std::string to_string(Level l) { return l == Level::One ? "level1" : "level2"; }

template <class W, class S>
struct WeakClosure {
    Level mode = Level::One;
    std::vector<W> silentReach;                // c => d, including c itself
    std::vector<std::pair<S, W>> outputs;      // c =>^s d
    std::vector<S> terminations;               // c ⇓ s
    bool truncated = false;
    std::size_t expansions = 0;
};

// Worklist exploration keyed on structural equality. `steps(w)` returns all
// one-step transitions of w. `fuel` bounds the number of expanded writers.
template <class W, class S, class WHash, class StepsFn>
WeakClosure<W, S> weak_closure(const W& c, std::size_t fuel, Level mode, StepsFn steps) {
    WeakClosure<W, S> out;
    out.mode = mode;
    std::unordered_set<W, WHash> seen;
    std::deque<W> work;
    seen.insert(c);
    work.push_back(c);
    out.silentReach.push_back(c);
    while (!work.empty()) {
        if (out.expansions >= fuel) {
            out.truncated = true;
            break;
        }
        W cur = std::move(work.front());
        work.pop_front();
        ++out.expansions;
        for (auto& st : steps(cur)) {
            switch (st.kind) {
                case StepKind::Done: {
                    bool dup = false;
                    for (const auto& t : out.terminations) dup = dup || t == st.state;
                    if (!dup) out.terminations.push_back(st.state);
                    break;
                }
                case StepKind::Output: {
                    bool dup = false;
                    for (const auto& o : out.outputs) dup = dup || (o.first == st.state && o.second == st.next);
                    if (!dup) out.outputs.emplace_back(st.state, st.next);
                    if (mode == Level::Two && seen.insert(st.next).second) {
                        out.silentReach.push_back(st.next);
                        work.push_back(st.next);
                    }
                    break;
                }
                case StepKind::Silent:
                    if (seen.insert(st.next).second) {
                        out.silentReach.push_back(st.next);
                        work.push_back(st.next);
                    }
                    break;
            }
        }
    }
    return out;
}

}  // namespace rwsos
