// One line per acceptance criterion; exit status 0 iff all pass.
// argv[1]: path of the kk binary (determinism criterion).
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "kk/verify.hpp"

using namespace kk;

namespace {

std::string run_capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
    status = pclose(p);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-kk>\n");
        return 2;
    }
    const std::map<int, double> limits{{1, 5}, {2, 5}, {4, 30}, {7, 10}, {8, 60}, {10, 20}};
    const std::map<int, std::string> titles{
        {1, "closed form equals series (Jacobi profile)"},
        {2, "closed form equals series (weighted ball)"},
        {3, "spot value K=20 at t=1/2"},
        {4, "TYZ fitted b1 and leading order"},
        {5, "TYZ coefficient recursion"},
        {6, "Mittag-Leffler identities and branch overlap"},
        {7, "Hankel eigenvalues"},
        {8, "Schatten cut-off at p=2n"},
        {9, "minimal-ball assembly equals closed form"},
        {10, "Monte Carlo orthogonality within 4 sigma"},
        {11, "exact moments equal quadrature"},
        {12, "verify output is deterministic"},
    };

    VerifyOptions opts;
    std::map<int, int> total, failed;
    std::map<int, double> seconds;
    for (const auto& suite : verify_suites()) {
        auto t0 = std::chrono::steady_clock::now();
        auto checks = run_suite(suite, opts);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& c : checks) {
            ++total[c.criterion];
            if (!c.pass) {
                ++failed[c.criterion];
                std::fprintf(stderr, "  failed: [%d] %s value=%.3g threshold=%.3g\n", c.criterion, c.name.c_str(), c.value,
                             c.threshold);
            }
            // suite time bounds each of its criteria from above
            seconds[c.criterion] = dt;
        }
    }

    bool all = true;
    for (int k = 1; k <= 11; ++k) {
        bool ok = total[k] > 0 && failed[k] == 0;
        std::ostringstream note;
        note << total[k] - failed[k] << "/" << total[k] << " checks";
        if (auto it = limits.find(k); it != limits.end()) {
            bool fast = seconds[k] < it->second;
            note << ", " << seconds[k] << " s (limit " << it->second << " s)";
            ok = ok && fast;
        }
        all = all && ok;
        std::printf("criterion %2d %s: %s (%s)\n", k, ok ? "PASS" : "FAIL", titles.at(k).c_str(), note.str().c_str());
    }

    const std::string cmd = std::string("\"") + argv[1] + "\" verify --suite all --seed 42 --threads 1 2>/dev/null";
    int s1 = 0, s2 = 0;
    std::string a = run_capture(cmd, s1), b = run_capture(cmd, s2);
    bool same = s1 == 0 && s2 == 0 && !a.empty() && a == b;
    all = all && same;
    std::printf("criterion 12 %s: %s (%zu bytes, exit %d/%d)\n", same ? "PASS" : "FAIL", titles.at(12).c_str(), a.size(), s1,
                s2);
    return all ? 0 : 1;
}
