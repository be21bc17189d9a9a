#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

Run kk(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " \"" KK_BINARY "\" " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("moments") {
    auto r = kk("moments --family bergman-beta --n 2 --s 0 --kmax 3");
    CHECK(r.code == 0);
    auto l = lines(r.out);
    REQUIRE(l.size() == 5);
    CHECK(l[0] == "k,q_k,log_q_k");
    CHECK(l[1].rfind("0,0.25,", 0) == 0);
    CHECK(l[3].rfind("2,0.16666666666666666,", 0) == 0);
    auto t = lines(kk("moments --family tabulated --values 1,1,1 --kmax 2").out);
    CHECK(t[1] == "0,1,0");
    CHECK(t[3] == "2,1,0");
    auto q = kk("moments --family power-exp --c 1 --m 1 --n 2 --s 1 --kmax 0 --check-quadrature --format json");
    CHECK(q.code == 0);
    auto j = nlohmann::json::parse(q.out);
    CHECK(j["rows"][0]["q_k"] == 1.0);
    CHECK(j["rows"][0]["rel_diff"].get<double>() <= 1e-10);
}

TEST_CASE("kernel") {
    auto r = kk("kernel --family jacobi --n 2 --exponent 0 --t 0.5 --compare-closed --format json");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["rows"][0]["series_re"].get<double>() - 20) <= 1e-9);
    CHECK(j["rows"][0]["rel_err"].get<double>() <= 1e-10);
    // t = 0: N(0)/q_0 with q_0 = 1/24
    auto z = nlohmann::json::parse(kk("kernel --family bergman-beta --n 3 --s 1 --t 0 --format json").out);
    CHECK(z["rows"][0]["series_re"].get<double>() == doctest::Approx(24.0));
    auto sweep = kk("kernel --family bergman-beta --n 3 --s 1 --points 0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9 --compare-closed");
    CHECK(sweep.code == 0);
    CHECK(kk("kernel --family bergman-beta --t 0.3+0.2i --compare-closed").code == 0);
    CHECK(kk("kernel --family bergman-beta --t 1.5").code == 3);
    CHECK(kk("kernel --family bergman-beta --t abc").code == 2);
    CHECK(kk("kernel --family tabulated --values 1,1 --n 2 --t 0.1 --compare-closed").code == 2);
}

TEST_CASE("tyz") {
    auto r = kk("tyz --n 3 --m 1 --format json");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() == 9);
    CHECK(j["params"]["b1_fit"].get<double>() == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(lines(kk("tyz --n 2 --s-grid 100,200,400").out)[0] == "s,lhs,partial_0,partial_1,residual");
}

TEST_CASE("schatten") {
    auto verdicts = [](const std::string& out) {
        std::string v;
        auto l = lines(out);
        for (std::size_t i = 1; i < l.size(); ++i) v += l[i].find(",Diverges,") != std::string::npos ? 'D' : l[i].find(",Converges,") != std::string::npos ? 'C' : 'I';
        return v;
    };
    CHECK(verdicts(kk("schatten --n 2 --p 3,5").out) == "DC");
    CHECK(verdicts(kk("schatten --n 3 --p 6,7").out) == "DC");
    CHECK(verdicts(kk("schatten --n 2 --p 100 --L 1000").out) == "C");
    CHECK(verdicts(kk("schatten --family model --a 2 --b 3 --r -2 --n 2 --degree 2 --p 4,5 --L 20000").out) == "DC");
    CHECK(kk("schatten --n 2 --p -1").code == 2);
}

TEST_CASE("verify") {
    auto r = kk("verify --suite mb --format json");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["command"] == "verify");
    CHECK(j["checks"].size() == 4);
    auto g = kk("verify --suite geometry --samples 100000 --seed 7");
    CHECK(g.code == 0);
    CHECK(kk("verify --suite nope").code == 2);
}

TEST_CASE("determinism and threads") {
    auto a = kk("verify --suite geometry --samples 20000 --seed 3 --threads 1");
    auto b = kk("verify --suite geometry --samples 20000 --seed 3 --threads 1");
    auto c = kk("verify --suite geometry --samples 20000 --seed 3", "KK_THREADS=4");
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(kk("verify --suite mb", "KK_THREADS=zero").code == 2);
    CHECK(kk("verify --suite mb --threads 0").code == 2);
}

TEST_CASE("usage errors") {
    CHECK(kk("").code == 2);
    CHECK(kk("frobnicate").code == 2);
    CHECK(kk("moments --unknown-flag").code == 2);
    CHECK(kk("moments --format xml").code == 2);
    CHECK(kk("moments --family tabulated").code == 2);
    CHECK(kk("moments --family bergman-beta --n 1").code == 2);
}

TEST_CASE("output file") {
    std::string path = "kk_cli_test_out.csv";
    CHECK(kk("moments --kmax 1 --output " + path).code == 0);
    std::ifstream f(path);
    std::string first;
    std::getline(f, first);
    CHECK(first == "k,q_k,log_q_k");
    std::remove(path.c_str());
}
