#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pmf {

// Uniform result type for the coefficient-level checkers.  A witness is a
// short human-readable description of the first datum violating the identity
// under test; witnesses are emitted in deterministic (lexicographic) order.
struct CheckReport {
    bool pass = true;
    std::int64_t checked = 0;  // identity instances actually verified
    std::int64_t skipped = 0;  // instances whose data fell outside the box
    std::vector<std::string> witnesses;

    void fail(const std::string& witness) {
        pass = false;
        witnesses.push_back(witness);
    }
    void merge(const CheckReport& o) {
        pass = pass && o.pass;
        checked += o.checked;
        skipped += o.skipped;
        witnesses.insert(witnesses.end(), o.witnesses.begin(), o.witnesses.end());
    }
};

} // namespace pmf
