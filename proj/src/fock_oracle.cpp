#include "bsv/fock_oracle.hpp"

#include "bsv/errors.hpp"

#include <cmath>
#include <sstream>

namespace bsv {

namespace {
constexpr int kHeadroom = 2;  // two creation operators per half-chain
}

FockBlock::FockBlock(int n_modes, int cutoff)
    : n_modes_(n_modes), cutoff_(cutoff), size_(cutoff + kHeadroom + 1),
      stride_(n_modes == 2 ? size_ : 1) {
    amp_ = Eigen::VectorXcd::Zero(n_modes == 2 ? size_ * size_ : size_);
}

FockBlock FockBlock::two_mode_squeezed(double r, int cutoff) {
    FockBlock b(2, cutoff);
    const double t = std::tanh(r);
    const double c0 = 1.0 / std::cosh(r);
    double ck = c0;
    for (int k = 0; k <= cutoff; ++k) {
        b.amp_(b.index(k, k)) = ck;
        ck *= t;
    }
    return b;
}

FockBlock FockBlock::single_mode_squeezed(double r, int cutoff) {
    FockBlock b(1, cutoff);
    const double t = std::tanh(r);
    const double c0 = 1.0 / std::sqrt(std::cosh(r));
    // c_k = (tanh r)^k sqrt((2k)!) / (2^k k!) / sqrt(cosh r) on |2k>
    double ck = c0;
    for (int k = 0; 2 * k <= cutoff; ++k) {
        b.amp_(2 * k) = ck;
        ck *= t * std::sqrt((2.0 * k + 1.0) * (2.0 * k + 2.0)) / (2.0 * (k + 1.0));
    }
    return b;
}

double FockBlock::norm2() const { return amp_.squaredNorm(); }

Eigen::VectorXcd FockBlock::apply_chain(const std::vector<Op>& ops) const {
    Eigen::VectorXcd v = amp_;
    Eigen::VectorXcd w(v.size());
    const int d0 = (n_modes_ == 2) ? stride_ : 1;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {  // rightmost acts first
        const int step = (it->slot == 0) ? d0 : 1;
        const int dim_other = (n_modes_ == 2) ? size_ : 1;
        w.setZero();
        for (int n = 0; n < size_; ++n) {
            for (int o = 0; o < dim_other; ++o) {
                const int base = (it->slot == 0) ? n * d0 + o : o * d0 + n;
                if (it->dagger) {
                    if (n > 0) w(base) = std::sqrt(double(n)) * v(base - step);
                } else {
                    if (n + 1 < size_) w(base) = std::sqrt(double(n + 1)) * v(base + step);
                }
            }
        }
        v.swap(w);
    }
    return v;
}

Complex FockBlock::expect(const std::vector<Op>& ops) const {
    const size_t half = ops.size() / 2;
    std::vector<Op> left_dag, right;
    for (size_t i = 0; i < half; ++i)
        left_dag.push_back({ops[half - 1 - i].slot, !ops[half - 1 - i].dagger});
    for (size_t i = half; i < ops.size(); ++i) right.push_back(ops[i]);
    // <psi| L R |psi> = < (L^dag psi), (R psi) >; left_dag already holds L^dag
    // in operator order (reversed factors, flipped daggers)
    const Eigen::VectorXcd bra = apply_chain(left_dag);
    const Eigen::VectorXcd ket = apply_chain(right);
    return bra.dot(ket);  // Eigen dot conjugates the left argument
}

TruncatedState evolve_tms(double r, int cutoff, double max_deficit) {
    return evolve_blocks({{SqueezeSpec::Kind::pair, r}}, cutoff, max_deficit);
}

TruncatedState evolve_blocks(const std::vector<SqueezeSpec>& specs, int cutoff,
                             double max_deficit) {
    if (specs.empty()) throw ConfigError("evolve_blocks: no squeezer specs");
    TruncatedState st;
    st.cutoff = cutoff;
    double norm2 = 1.0;
    for (const SqueezeSpec& s : specs) {
        if (s.r < 0) throw ConfigError("evolve_blocks: squeeze parameter must be >= 0");
        const int bi = static_cast<int>(st.blocks.size());
        if (s.kind == SqueezeSpec::Kind::pair) {
            st.blocks.push_back(FockBlock::two_mode_squeezed(s.r, cutoff));
            st.slot_of_mode.push_back({bi, 0});
            st.slot_of_mode.push_back({bi, 1});
        } else {
            st.blocks.push_back(FockBlock::single_mode_squeezed(s.r, cutoff));
            st.slot_of_mode.push_back({bi, 0});
        }
        st.squeeze_params.push_back(s.r);
        norm2 *= st.blocks.back().norm2();
    }
    st.norm_deficit = 1.0 - norm2;
    if (st.norm_deficit > max_deficit) {
        std::ostringstream msg;
        msg << "evolve_blocks: cutoff " << cutoff << " too small, norm deficit "
            << st.norm_deficit << " > " << max_deficit;
        throw NumericalError(msg.str());
    }
    return st;
}

namespace {

/// <a(+)_i a(+)_j ...> over the product state: factorizes across blocks.
Complex monomial(const TruncatedState& st, const std::vector<std::pair<int, bool>>& ops) {
    std::vector<std::vector<FockBlock::Op>> per_block(st.blocks.size());
    for (const auto& [mode, dag] : ops) {
        const auto [bi, slot] = st.slot_of_mode[mode];
        per_block[bi].push_back({slot, dag});
    }
    Complex out(1.0, 0.0);
    for (size_t b = 0; b < st.blocks.size(); ++b) {
        if (per_block[b].empty())
            out *= st.blocks[b].norm2();
        else
            out *= st.blocks[b].expect(per_block[b]);
    }
    return out;
}

} // namespace

OracleMoments oracle_moments(const TruncatedState& state,
                             const std::vector<PixelOperator>& pixels) {
    const int np = static_cast<int>(pixels.size());
    const int nm = state.n_modes();
    for (const PixelOperator& p : pixels)
        if (p.coeff.size() != nm)
            throw ConfigError("oracle_moments: pixel coefficient count != mode count");

    OracleMoments out;
    out.n.resize(np);
    out.nn.resize(np, np);

    for (int p = 0; p < np; ++p) {
        Complex acc(0.0, 0.0);
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j) {
                const Complex c = std::conj(pixels[p].coeff(i)) * pixels[p].coeff(j);
                if (c == Complex(0.0, 0.0)) continue;
                acc += c * monomial(state, {{i, true}, {j, false}});
            }
        out.n(p) = acc.real();
    }
    for (int p = 0; p < np; ++p) {
        for (int q = p; q < np; ++q) {
            Complex acc(0.0, 0.0);
            for (int i = 0; i < nm; ++i)
                for (int j = 0; j < nm; ++j)
                    for (int k = 0; k < nm; ++k)
                        for (int l = 0; l < nm; ++l) {
                            const Complex c = std::conj(pixels[p].coeff(i)) *
                                              pixels[p].coeff(j) *
                                              std::conj(pixels[q].coeff(k)) *
                                              pixels[q].coeff(l);
                            if (c == Complex(0.0, 0.0)) continue;
                            acc += c * monomial(state, {{i, true}, {j, false},
                                                        {k, true}, {l, false}});
                        }
            out.nn(p, q) = acc.real();
            out.nn(q, p) = acc.real();
        }
    }
    return out;
}

double moment_sensitivity(const OracleMoments& a, const OracleMoments& b) {
    double worst = 0.0;
    auto rel = [](double x, double y) {
        const double scale = std::max({std::abs(x), std::abs(y), 1e-30});
        return std::abs(x - y) / scale;
    };
    for (int p = 0; p < a.n.size(); ++p) worst = std::max(worst, rel(a.n(p), b.n(p)));
    for (int p = 0; p < a.nn.rows(); ++p)
        for (int q = 0; q < a.nn.cols(); ++q)
            worst = std::max(worst, rel(a.nn(p, q), b.nn(p, q)));
    return worst;
}

} // namespace bsv
