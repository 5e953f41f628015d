#include <qpa/frequency.hpp>

#include <qpa/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace qpa {

// --------------------------- helpers --------------------------------------------

namespace {

Int rat_floor(const Rat& x) {
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return f;
}

long long to_ll(const Int& v, const char* what) {
    if (!v.fits_slong_p()) {
        throw ConfigError(std::string("value too large for desk scale in ") + what + ": " + v.get_str());
    }
    return static_cast<long long>(v.get_si());
}

} // namespace

// --------------------------- validation -----------------------------------------

void Frequency::validate() const {
    if (omega.empty()) throw ConfigError("frequency: omega must be nonempty");
    for (double w : omega) {
        if (!std::isfinite(w) || w == 0.0) {
            throw ConfigError("frequency: components must be finite and nonzero");
        }
    }
    if (!(a0 > 0.0 && a0 < 1.0)) throw ConfigError("frequency: a0 must lie in (0,1)");
    if (!(b0 > static_cast<double>(nu()))) throw ConfigError("frequency: b0 must exceed nu");
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("frequency: c must lie in (0,1)");
    if (!(beta > 1.0)) throw ConfigError("frequency: beta must exceed 1");
}

void RationalFrequency::validate() const {
    if (num.empty() || num.size() != den.size()) {
        throw ConfigError("rational frequency: num and den must be nonempty and equal-sized");
    }
    if (r < 1) throw ConfigError("rational frequency: r must be >= 1");
    for (std::size_t j = 0; j < num.size(); ++j) {
        if (den[j] <= 0) throw ConfigError("rational frequency: denominators must be positive");
        if (num[j] == 0) throw ConfigError("rational frequency: components must be nonzero");
    }
}

// --------------------------- shell enumeration ----------------------------------

void for_each_l1_shell(int nu, long long s,
                       const std::function<void(const std::vector<long long>&)>& fn) {
    std::vector<long long> n(static_cast<std::size_t>(nu), 0);
    auto rec = [&](auto&& self, int i, long long rem) -> void {
        if (i == nu - 1) {
            if (rem == 0) {
                n[i] = 0;
                fn(n);
            } else {
                n[i] = -rem;
                fn(n);
                n[i] = rem;
                fn(n);
            }
            n[i] = 0;
            return;
        }
        for (long long v = -rem; v <= rem; ++v) {
            n[i] = v;
            self(self, i + 1, rem - std::llabs(v));
        }
        n[i] = 0;
    };
    if (nu >= 1) rec(rec, 0, s);
}

// --------------------------- check_diophantine ----------------------------------

DiophantineReport check_diophantine(const Frequency& f, long long R) {
    f.validate();
    if (R < 1) throw ConfigError("check_diophantine: R must be >= 1");
    DiophantineReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (long long s = 1; s <= R; ++s) {
        const double sp = std::pow(static_cast<double>(s), f.b0);
        for_each_l1_shell(f.nu(), s, [&](const std::vector<long long>& n) {
            double dot = 0.0;
            for (int j = 0; j < f.nu(); ++j) dot += static_cast<double>(n[j]) * f.omega[j];
            const double ratio = std::fabs(dot) * sp;
            if (ratio < rep.min_ratio) {
                rep.min_ratio = ratio;
                rep.min_abs = std::fabs(dot);
                rep.argmin = n;
            }
        });
    }
    rep.pass = rep.min_ratio >= f.a0;
    return rep;
}

// --------------------------- rational_approximation -----------------------------

namespace {

// One component: walks the continued fraction of the half-ulp enclosure of w.
// Returns the first convergent with denominator > r; an exactly-rational input
// with denominator <= r passes through unchanged.
void approx_component(double w, long long r, double c, double beta,
                      long long& num_out, long long& den_out) {
    const Rat x(w); // exact binary value
    const double up = std::nextafter(w, std::numeric_limits<double>::infinity());
    const double dn = std::nextafter(w, -std::numeric_limits<double>::infinity());
    Rat gap_up = Rat(up) - x;
    Rat gap_dn = x - Rat(dn);
    Rat u = (gap_up > gap_dn ? gap_up : gap_dn) / 2;
    Rat lo = x - u, hi = x + u;

    const Int r_int(static_cast<long>(r));
    Int p1 = 1, p2 = 0, q1 = 0, q2 = 1; // convergent recurrences, indices s-1 / s-2
    Int achieved = 0;
    const double t_budget = std::pow(static_cast<double>(r), beta) / c;

    auto finish = [&](const Int& p, const Int& q, bool exact_rational) {
        if (!exact_rational && mpz_cmp_d(q.get_mpz_t(), t_budget) > 0) {
            throw PrecisionBudgetError(
                "rational approximation: denominator " + q.get_str() +
                    " exceeds the (c,beta) budget at r=" + std::to_string(r),
                to_ll(q, "rational_approximation"));
        }
        num_out = to_ll(p, "rational_approximation");
        den_out = to_ll(q, "rational_approximation");
    };

    for (int step = 0; step < 100000; ++step) {
        const Int alo = rat_floor(lo), ahi = rat_floor(hi);
        if (alo != ahi) {
            // The enclosure straddles an integer at this depth; the simplest
            // rational consistent with the input terminates here.
            const Int a = alo + 1;
            const Int p = a * p1 + p2, q = a * q1 + q2;
            if (q <= r_int) {
                finish(p, q, true);
                return;
            }
            throw PrecisionBudgetError(
                "rational approximation: continued fraction uncertifiable past denominator " +
                    achieved.get_str() + " for input " + std::to_string(w),
                to_ll(achieved, "rational_approximation"));
        }
        const Int a = alo;
        const Int p = a * p1 + p2, q = a * q1 + q2;
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
        achieved = q;
        if (q > r_int) {
            finish(p, q, false);
            return;
        }
        Rat flo = lo - Rat(a), fhi = hi - Rat(a);
        if (fhi == 0 || flo == 0) {
            // An endpoint terminates exactly: the input is (certified consistent
            // with) the current convergent, whose denominator is still <= r.
            finish(p, q, true);
            return;
        }
        const Rat nlo = 1 / fhi, nhi = 1 / flo;
        lo = nlo;
        hi = nhi;
    }
    throw NumericalError("rational approximation: continued fraction failed to terminate");
}

} // namespace

RationalFrequency rational_approximation(const Frequency& f, long long r) {
    f.validate();
    if (r < 2) throw ConfigError("rational_approximation: r must be >= 2");
    RationalFrequency rf;
    rf.r = r;
    rf.num.resize(f.omega.size());
    rf.den.resize(f.omega.size());
    for (int j = 0; j < f.nu(); ++j) {
        approx_component(f.omega[j], r, f.c, f.beta, rf.num[j], rf.den[j]);
    }
    rf.validate();
    return rf;
}

// --------------------------- build_lattice --------------------------------------

OmegaLattice build_lattice(const RationalFrequency& rf) {
    rf.validate();
    const int nu = rf.nu();
    OmegaLattice lat;
    lat.rf = rf;

    std::vector<Int> p(nu), t(nu);
    lat.red_num.resize(nu);
    lat.red_den.resize(nu);
    for (int j = 0; j < nu; ++j) {
        Rat w(static_cast<long>(rf.num[j]), static_cast<long>(rf.den[j]));
        w.canonicalize();
        p[j] = w.get_num();
        t[j] = w.get_den();
        lat.red_num[j] = to_ll(p[j], "build_lattice");
        lat.red_den[j] = to_ll(t[j], "build_lattice");
    }

    Int Tbar = 1;
    for (int j = 0; j < nu; ++j) Tbar *= t[j];
    std::vector<Int> L(nu);
    Int gl = 0;
    for (int j = 0; j < nu; ++j) {
        L[j] = p[j] * (Tbar / t[j]);
        Int absL;
        mpz_abs(absL.get_mpz_t(), L[j].get_mpz_t());
        mpz_gcd(gl.get_mpz_t(), gl.get_mpz_t(), absL.get_mpz_t());
    }
    Int G;
    mpz_gcd(G.get_mpz_t(), gl.get_mpz_t(), Tbar.get_mpz_t());

    lat.tau0 = Rat(G, Tbar);
    lat.tau0.canonicalize();
    lat.T = to_ll(Tbar / G, "build_lattice period");
    lat.lcoef.resize(nu);
    for (int j = 0; j < nu; ++j) lat.lcoef[j] = to_ll(L[j] / G, "build_lattice lcoef");

    // Exact identity omega~_j = lcoef_j * tau0.
    for (int j = 0; j < nu; ++j) {
        Rat lhs(p[j], t[j]);
        Rat rhs = Rat(static_cast<long>(lat.lcoef[j])) * lat.tau0;
        if (lhs != rhs) {
            throw InternalArithmeticError("build_lattice: lcoef identity failed");
        }
    }

    // Integer kernel of the row (lcoef_1 ... lcoef_nu) via unimodular column ops.
    std::vector<Int> v(nu);
    for (int j = 0; j < nu; ++j) v[j] = static_cast<long>(lat.lcoef[j]);
    std::vector<std::vector<Int>> U(nu, std::vector<Int>(nu, 0));
    for (int j = 0; j < nu; ++j) U[j][j] = 1;
    for (int j = 1; j < nu; ++j) {
        Int g, s, tt;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), tt.get_mpz_t(),
                   v[0].get_mpz_t(), v[j].get_mpz_t());
        const Int m00 = s, m01 = tt;            // new col0 = s*c0 + t*cj
        const Int m10 = -v[j] / g, m11 = v[0] / g; // new colj = -(vj/g)*c0 + (v0/g)*cj
        for (int i = 0; i < nu; ++i) {
            const Int c0 = U[i][0], cj = U[i][j];
            U[i][0] = m00 * c0 + m01 * cj;
            U[i][j] = m10 * c0 + m11 * cj;
        }
        v[0] = g;
        v[j] = 0;
    }
    for (int j = 1; j < nu; ++j) {
        std::vector<long long> col(nu);
        for (int i = 0; i < nu; ++i) col[i] = to_ll(U[i][j], "build_lattice null basis");
        // sign convention: first nonzero component positive
        for (int i = 0; i < nu; ++i) {
            if (col[i] != 0) {
                if (col[i] < 0) {
                    for (auto& x : col) x = -x;
                }
                break;
            }
        }
        lat.null_basis.push_back(std::move(col));
    }
    std::sort(lat.null_basis.begin(), lat.null_basis.end());
    for (const auto& b : lat.null_basis) {
        if (lat.ell(b) != 0) throw InternalArithmeticError("build_lattice: null basis check failed");
    }
    return lat;
}

// --------------------------- lattice methods ------------------------------------

long long OmegaLattice::max_den() const {
    long long m = 1;
    for (long long d : red_den) m = std::max(m, d);
    return m;
}

long long OmegaLattice::ell(const std::vector<long long>& n) const {
    if (static_cast<int>(n.size()) != nu()) {
        throw ConfigError("ell: dimension mismatch");
    }
    Int acc = 0;
    for (int j = 0; j < nu(); ++j) acc += Int(static_cast<long>(n[j])) * Int(static_cast<long>(lcoef[j]));
    return to_ll(acc, "ell");
}

// --------------------------- coset_index ----------------------------------------

long long coset_index(const OmegaLattice& lat, const std::vector<long long>& n) {
    const long long l = lat.ell(n);
    // Defining identity ell = T*(n.omega~), re-evaluated in floating point.
    double dot = 0.0;
    for (int j = 0; j < lat.nu(); ++j) {
        dot += static_cast<double>(n[j]) * (static_cast<double>(lat.red_num[j]) / static_cast<double>(lat.red_den[j]));
    }
    const double residue = std::fabs(dot * static_cast<double>(lat.T) - static_cast<double>(l));
    if (residue > 1e-9 * static_cast<double>(lat.T)) {
        std::ostringstream os;
        os << "coset_index: residue " << residue << " exceeds 1e-9*T";
        throw InternalArithmeticError(os.str());
    }
    return l;
}

// --------------------------- quotient_norm --------------------------------------

QuotientNormResult quotient_norm(const OmegaLattice& lat, long long ell_target, long long radius) {
    if (radius < 0) radius = 4 * std::llabs(ell_target) * lat.max_den();

    // Exact reachability: ell values live in content(lcoef)*Z.
    Int content = 0;
    for (long long lc : lat.lcoef) {
        Int a(static_cast<long>(std::llabs(lc)));
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), a.get_mpz_t());
    }
    const long long d = to_ll(content, "quotient_norm content");
    if (d != 0 && ell_target % d != 0) {
        std::ostringstream os;
        os << "quotient_norm: label " << ell_target << " is not a multiple of the lattice content " << d;
        throw NotFoundError(os.str());
    }

    for (long long s = 0; s <= radius; ++s) {
        bool found = false;
        std::vector<long long> rep;
        for_each_l1_shell(lat.nu(), s, [&](const std::vector<long long>& n) {
            if (found) return;
            if (lat.ell(n) == ell_target) {
                found = true;
                rep = n;
            }
        });
        if (found) return {s, rep};
    }
    std::ostringstream os;
    os << "quotient_norm: no representative of label " << ell_target << " within radius " << radius;
    throw NotFoundError(os.str());
}

// --------------------------- coset_ball -----------------------------------------

std::vector<Coset> coset_ball(const OmegaLattice& lat, long long R) {
    if (R < 0) throw ConfigError("coset_ball: R must be >= 0");
    std::map<long long, Coset> seen;
    for (long long s = 0; s <= R; ++s) {
        for_each_l1_shell(lat.nu(), s, [&](const std::vector<long long>& n) {
            const long long l = lat.ell(n);
            if (seen.find(l) == seen.end()) {
                seen.emplace(l, Coset{l, s, n});
            }
        });
    }
    std::vector<Coset> out;
    out.reserve(seen.size());
    for (auto& kv : seen) out.push_back(std::move(kv.second));
    return out;
}

} // namespace qpa
