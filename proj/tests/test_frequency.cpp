#include <doctest.h>

#include <qpa/errors.hpp>
#include <qpa/frequency.hpp>

#include <cmath>
#include <set>

using namespace qpa;

namespace {

const double GOLDEN = (std::sqrt(5.0) - 1.0) / 2.0; // 0.618033988...
const double SQRT2M1 = std::sqrt(2.0) - 1.0;        // 0.414213562...

Frequency golden1(double a0 = 0.38, double b0 = 1.01) {
    return Frequency({GOLDEN}, a0, b0, 0.05, 2.5);
}

Frequency pair2(double a0 = 0.1, double b0 = 2.01) {
    return Frequency({GOLDEN, SQRT2M1}, a0, b0, 0.05, 2.5);
}

RationalFrequency half_third() { return RationalFrequency({1, 1}, {2, 3}, 3); }

// Brute-force oracle for the quotient norm: scan |n|_1 <= cap directly.
long long brute_quotient_norm(const OmegaLattice& lat, long long target, long long cap,
                              std::vector<long long>* rep_out = nullptr) {
    for (long long s = 0; s <= cap; ++s) {
        long long found = -1;
        std::vector<long long> rep;
        for_each_l1_shell(lat.nu(), s, [&](const std::vector<long long>& n) {
            if (found >= 0) return;
            if (lat.ell(n) == target) {
                found = s;
                rep = n;
            }
        });
        if (found >= 0) {
            if (rep_out) *rep_out = rep;
            return found;
        }
    }
    return -1;
}

} // namespace

TEST_SUITE("frequency") {

// --------------------------- type validation -----------------------------------

TEST_CASE("frequency validation rejects bad budgets") {
    CHECK_THROWS_AS(Frequency({0.5, 0.0}, 0.1, 2.5, 0.1, 2.0), ConfigError); // zero component
    CHECK_THROWS_AS(Frequency({0.5}, 0.0, 2.0, 0.1, 2.0), ConfigError);      // a0 out of range
    CHECK_THROWS_AS(Frequency({0.5}, 1.5, 2.0, 0.1, 2.0), ConfigError);
    CHECK_THROWS_AS(Frequency({GOLDEN, SQRT2M1}, 0.1, 2.0, 0.1, 2.0), ConfigError); // b0 == nu
    CHECK_THROWS_AS(Frequency({0.5}, 0.1, 2.0, 0.1, 0.9), ConfigError);      // beta <= 1
    CHECK_NOTHROW(Frequency({GOLDEN}, 0.38, 1.01, 0.05, 2.5));
}

TEST_CASE("rational frequency validation") {
    CHECK_THROWS_AS(RationalFrequency({1}, {0}, 5), ConfigError);     // zero denominator
    CHECK_THROWS_AS(RationalFrequency({1, 1}, {2}, 5), ConfigError);  // size mismatch
    CHECK_THROWS_AS(RationalFrequency({0}, {2}, 5), ConfigError);     // zero component
    CHECK_NOTHROW(RationalFrequency({1, 1}, {2, 3}, 3));
}

// --------------------------- check_diophantine ---------------------------------

TEST_CASE("diophantine scan: golden mean passes at a0=0.38") {
    auto rep = check_diophantine(golden1(), 50);
    CHECK(rep.pass);
    // |n*omega| grows with |n| in one dimension, so the minimizer is n = +-1.
    CHECK(std::llabs(rep.argmin[0]) == 1);
    CHECK(rep.min_ratio == doctest::Approx(GOLDEN).epsilon(1e-12));
}

TEST_CASE("diophantine scan: rationally dependent pair fails") {
    // omega_1 + omega_2 = 0 makes |n.omega| vanish at n = (1,1).
    Frequency f({0.7310562, -0.7310562}, 0.1, 2.01, 0.05, 2.5);
    auto rep = check_diophantine(f, 2);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_abs == doctest::Approx(0.0));
    CHECK(std::llabs(rep.argmin[0]) == 1);
    CHECK(rep.argmin[0] == rep.argmin[1]);
}

TEST_CASE("diophantine scan: golden/sqrt2 pair passes at a0=0.1") {
    auto rep = check_diophantine(pair2(), 30);
    CHECK(rep.pass);
    CHECK(rep.min_ratio >= 0.1);
    // In-test oracle: exhaustive rescan certifying the reported minimum.
    double best = 1e300;
    std::vector<long long> argmin(2, 0);
    for (long long n1 = -30; n1 <= 30; ++n1) {
        for (long long n2 = -30; n2 <= 30; ++n2) {
            long long l1 = std::llabs(n1) + std::llabs(n2);
            if (l1 == 0 || l1 > 30) continue;
            double v = std::fabs(n1 * GOLDEN + n2 * SQRT2M1) * std::pow(double(l1), 2.01);
            if (v < best) {
                best = v;
                argmin = {n1, n2};
            }
        }
    }
    CHECK(rep.min_ratio == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::llabs(rep.argmin[0]) == std::llabs(argmin[0]));
    CHECK(std::llabs(rep.argmin[1]) == std::llabs(argmin[1]));
    // The worst combination at this depth is (2,-3) up to sign.
    CHECK(std::llabs(rep.argmin[0]) == 2);
    CHECK(std::llabs(rep.argmin[1]) == 3);
}

// --------------------------- rational_approximation ----------------------------

TEST_CASE("continued fractions: golden mean ladder") {
    auto f = golden1();
    auto r10 = rational_approximation(f, 10);
    CHECK(r10.num[0] == 8);
    CHECK(r10.den[0] == 13);
    auto r20 = rational_approximation(f, 20);
    CHECK(r20.num[0] == 13);
    CHECK(r20.den[0] == 21);
    auto r50 = rational_approximation(f, 50);
    CHECK(r50.num[0] == 34);
    CHECK(r50.den[0] == 55);
}

TEST_CASE("continued fractions: sqrt(2)-1 ladder") {
    Frequency f({SQRT2M1}, 0.38, 1.01, 0.05, 2.5);
    auto r10 = rational_approximation(f, 10);
    CHECK(r10.num[0] == 5);
    CHECK(r10.den[0] == 12);
    auto r20 = rational_approximation(f, 20);
    CHECK(r20.num[0] == 12);
    CHECK(r20.den[0] == 29);
    auto r50 = rational_approximation(f, 50);
    CHECK(r50.num[0] == 29);
    CHECK(r50.den[0] == 70);
}

TEST_CASE("approximation selection rule: q(s) <= r < q(s+1), exact error bounds") {
    auto f = pair2();
    for (long long r : {10LL, 20LL, 50LL, 200LL}) {
        auto rf = rational_approximation(f, r);
        for (int j = 0; j < f.nu(); ++j) {
            CHECK(rf.den[j] > r);
            // Lemma-form error bound |omega_j - p/q| < 1/r, checked in exact
            // arithmetic against the binary value of the double.
            Rat x(f.omega[j]);
            Rat approx(Int(static_cast<long>(rf.num[j])), Int(static_cast<long>(rf.den[j])));
            Rat err = x - approx;
            if (err < 0) err = -err;
            CHECK(err < Rat(1, static_cast<unsigned long>(r)));
            // Denominator growth budget t_j <= c^{-1} r^beta.
            CHECK(static_cast<double>(rf.den[j]) <= std::pow(double(r), f.beta) / f.c);
        }
    }
}

TEST_CASE("rational components pass through when denominator fits the budget") {
    Frequency f({0.5, 0.25}, 0.1, 2.01, 0.05, 2.5);
    auto rf = rational_approximation(f, 10);
    CHECK(rf.num[0] == 1);
    CHECK(rf.den[0] == 2);
    CHECK(rf.num[1] == 1);
    CHECK(rf.den[1] == 4);
}

TEST_CASE("negative component approximates with negative numerator") {
    Frequency f({-GOLDEN}, 0.38, 1.01, 0.05, 2.5);
    auto rf = rational_approximation(f, 10);
    CHECK(rf.num[0] == -8);
    CHECK(rf.den[0] == 13);
}

// --------------------------- build_lattice -------------------------------------

TEST_CASE("lattice of (1/2, 1/3)") {
    auto lat = build_lattice(half_third());
    CHECK(lat.T == 6);
    CHECK(lat.tau0 == Rat(1, 6));
    REQUIRE(lat.lcoef.size() == 2);
    CHECK(lat.lcoef[0] == 3);
    CHECK(lat.lcoef[1] == 2);
    REQUIRE(lat.null_basis.size() == 1);
    CHECK(lat.null_basis[0] == std::vector<long long>{2, -3});
    CHECK(lat.ell({1, 0}) == 3);
    CHECK(lat.ell({0, 1}) == 2);
    CHECK(lat.ell({2, -3}) == 0);
}

TEST_CASE("lattice of a single rational 3/5") {
    auto lat = build_lattice(RationalFrequency({3}, {5}, 5));
    CHECK(lat.T == 5);
    CHECK(lat.tau0 == Rat(1, 5));
    CHECK(lat.lcoef[0] == 3);
    CHECK(lat.null_basis.empty());
    CHECK(lat.ell({4}) == 12);
}

TEST_CASE("unreduced input 2/4 is reduced before use") {
    auto lat = build_lattice(RationalFrequency({2}, {4}, 4));
    CHECK(lat.T == 2);
    CHECK(lat.tau0 == Rat(1, 2));
    CHECK(lat.red_num[0] == 1);
    CHECK(lat.red_den[0] == 2);
    CHECK(lat.lcoef[0] == 1);
}

TEST_CASE("lattice of (8/13, 5/12): the r=10 desk pair") {
    auto lat = build_lattice(RationalFrequency({8, 5}, {13, 12}, 10));
    CHECK(lat.T == 156);
    CHECK(lat.lcoef[0] == 96);
    CHECK(lat.lcoef[1] == 65);
    REQUIRE(lat.null_basis.size() == 1);
    // Kernel of (96, 65): generated by (65, -96).
    CHECK(lat.ell(lat.null_basis[0]) == 0);
    CHECK(std::llabs(lat.null_basis[0][0]) == 65);
    CHECK(std::llabs(lat.null_basis[0][1]) == 96);
}

TEST_CASE("lattice of (34/55, 29/70): common factor in the joint lattice") {
    auto lat = build_lattice(RationalFrequency({34, 29}, {55, 70}, 50));
    // Tbar = 3850, L = (2380, 1595), g = gcd(gcd(2380,1595), 3850) = 5.
    CHECK(lat.T == 770);
    CHECK(lat.tau0 == Rat(1, 770));
    CHECK(lat.lcoef[0] == 476);
    CHECK(lat.lcoef[1] == 319);
}

TEST_CASE("lattice invariants: n.omega~ = ell(n)*tau0 exactly") {
    auto lat = build_lattice(RationalFrequency({8, 5}, {13, 12}, 10));
    Rat w1(8, 13), w2(5, 12);
    for (long long n1 = -4; n1 <= 4; ++n1) {
        for (long long n2 = -4; n2 <= 4; ++n2) {
            Rat lhs = static_cast<long>(n1) * w1 + static_cast<long>(n2) * w2;
            Rat rhs = Rat(static_cast<long>(lat.ell({n1, n2}))) * lat.tau0;
            CHECK(lhs == rhs);
        }
    }
    // tau0 >= 1/Tbar.
    CHECK(lat.tau0 >= Rat(1, 156));
}

// --------------------------- coset_index ---------------------------------------

TEST_CASE("coset index examples on (1/2,1/3)") {
    auto lat = build_lattice(half_third());
    CHECK(coset_index(lat, {1, 0}) == 3);
    CHECK(coset_index(lat, {0, 1}) == 2);
    CHECK(coset_index(lat, {2, -3}) == 0);
}

TEST_CASE("coset index additivity") {
    auto lat = build_lattice(RationalFrequency({8, 5}, {13, 12}, 10));
    std::vector<std::vector<long long>> pts = {{1, 0}, {0, 1}, {2, -1}, {-3, 2}};
    for (const auto& a : pts) {
        for (const auto& b : pts) {
            std::vector<long long> s = {a[0] + b[0], a[1] + b[1]};
            CHECK(coset_index(lat, s) == coset_index(lat, a) + coset_index(lat, b));
        }
    }
}

// --------------------------- quotient_norm -------------------------------------

TEST_CASE("quotient norm on (1/2,1/3): frozen small cases") {
    auto lat = build_lattice(half_third());

    auto q3 = quotient_norm(lat, 3);
    CHECK(q3.norm == 1);
    CHECK(q3.rep == std::vector<long long>{1, 0});

    auto q0 = quotient_norm(lat, 0);
    CHECK(q0.norm == 0);
    CHECK(q0.rep == std::vector<long long>{0, 0});

    // ell = 1 is attained by (1,-1): 3 - 2 = 1, so the norm is 2.
    auto q1 = quotient_norm(lat, 1);
    CHECK(q1.norm == 2);
    CHECK(std::llabs(q1.rep[0]) == 1);
    CHECK(std::llabs(q1.rep[1]) == 1);

    // Brute-force cross-check of every label in reach.
    for (long long l = -6; l <= 6; ++l) {
        std::vector<long long> rep;
        long long bn = brute_quotient_norm(lat, l, 8, &rep);
        REQUIRE(bn >= 0);
        auto qn = quotient_norm(lat, l);
        CHECK(qn.norm == bn);
        CHECK(lat.ell(qn.rep) == l);
    }
}

TEST_CASE("quotient norm: null-lattice invariance and subadditivity") {
    auto lat = build_lattice(half_third());
    for (long long l = -5; l <= 5; ++l) {
        auto q = quotient_norm(lat, l);
        // shifting the representative by the null vector cannot go below the norm
        std::vector<long long> shifted = {q.rep[0] + lat.null_basis[0][0],
                                          q.rep[1] + lat.null_basis[0][1]};
        CHECK(lat.ell(shifted) == l);
        CHECK(std::llabs(shifted[0]) + std::llabs(shifted[1]) >= q.norm);
    }
    // subadditivity |a+b| <= |a|+|b| on labels
    for (long long la = -4; la <= 4; ++la) {
        for (long long lb = -4; lb <= 4; ++lb) {
            auto qa = quotient_norm(lat, la);
            auto qb = quotient_norm(lat, lb);
            auto qs = quotient_norm(lat, la + lb);
            CHECK(qs.norm <= qa.norm + qb.norm);
        }
    }
}

TEST_CASE("quotient norm on the T=156 lattice: the far coset ell=1") {
    auto lat = build_lattice(RationalFrequency({8, 5}, {13, 12}, 10));
    auto q = quotient_norm(lat, 1);
    // 21*96 - 31*65 = 2016 - 2015 = 1, and no shorter representative exists.
    CHECK(q.norm == 52);
    CHECK(lat.ell(q.rep) == 1);
    // Near cosets stay short.
    CHECK(quotient_norm(lat, 96).norm == 1);
    CHECK(quotient_norm(lat, 65).norm == 1);
    CHECK(quotient_norm(lat, 31).norm == 2);  // (1,-1)
    CHECK(quotient_norm(lat, 161).norm == 2); // (1,1)
}

TEST_CASE("quotient norm: degenerate label throws not-found") {
    // omega~ = (2/3): lcoef = (2), labels live in 2Z; ell = 1 is unreachable.
    auto lat = build_lattice(RationalFrequency({2}, {3}, 3));
    CHECK(lat.T == 3);
    CHECK(lat.lcoef[0] == 2);
    CHECK_THROWS_AS(quotient_norm(lat, 1), NotFoundError);
    CHECK(quotient_norm(lat, 2).norm == 1);
}

TEST_CASE("norm sandwich: c*|m|_R <= |m| <= C*|m|_R on the desk lattice") {
    auto lat = build_lattice(RationalFrequency({8, 5}, {13, 12}, 10));
    const double wmax = std::max(8.0 / 13.0, 5.0 / 12.0);
    const double Cup = 4.0 * static_cast<double>(lat.max_den());
    for (long long l = 1; l <= 200; l += 7) {
        auto q = quotient_norm(lat, l);
        const double m_real = std::fabs(static_cast<double>(l)) / static_cast<double>(lat.T);
        CHECK(static_cast<double>(q.norm) >= m_real / wmax - 1e-12);
        CHECK(static_cast<double>(q.norm) <= Cup * static_cast<double>(lat.T) * m_real + 1e-12);
    }
}

// --------------------------- coset_ball ----------------------------------------

TEST_CASE("coset ball matches per-label quotient norms") {
    auto lat = build_lattice(half_third());
    auto ball = coset_ball(lat, 3);
    // Labels reachable with |n|_1 <= 3 on lcoef (3,2):
    std::set<long long> labels;
    for (const auto& c : ball) {
        labels.insert(c.ell);
        CHECK(c.norm == quotient_norm(lat, c.ell).norm);
        CHECK(lat.ell(c.rep) == c.ell);
        CHECK(c.norm <= 3);
    }
    CHECK(labels.count(0) == 1);
    CHECK(labels.count(3) == 1);
    CHECK(labels.count(2) == 1);
    CHECK(labels.count(1) == 1);  // via (1,-1)
    CHECK(labels.count(9) == 1);  // (3,0)
    CHECK(labels.count(-9) == 1);
    // Sorted by label.
    for (std::size_t i = 1; i < ball.size(); ++i) CHECK(ball[i - 1].ell < ball[i].ell);
}

// --------------------------- box Diophantine (Cor. of the approximation lemma) --

TEST_CASE("approximants inherit the box Diophantine bound at r=1000") {
    auto f = pair2(0.1, 2.01);
    auto rf = rational_approximation(f, 1000);
    // Golden: first denominator > 1000 is 1597; sqrt(2)-1: 2378.
    CHECK(rf.den[0] == 1597);
    CHECK(rf.den[1] == 2378);
    const double a0p = f.a0 / 2.0;
    const double Rbar = std::pow(a0p * 1000.0 / f.nu(), 1.0 / (f.b0 + 1.0));
    CHECK(Rbar > 2.0);
    const long long Rscan = static_cast<long long>(std::floor(Rbar));
    double w1 = rf.value(0), w2 = rf.value(1);
    for (long long n1 = -Rscan; n1 <= Rscan; ++n1) {
        for (long long n2 = -Rscan; n2 <= Rscan; ++n2) {
            long long l1 = std::llabs(n1) + std::llabs(n2);
            if (l1 == 0 || l1 > Rscan) continue;
            double v = std::fabs(n1 * w1 + n2 * w2);
            CHECK(v >= a0p * std::pow(double(l1), -f.b0));
        }
    }
}

} // TEST_SUITE
