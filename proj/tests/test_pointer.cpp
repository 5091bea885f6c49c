#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nuweak/pointer.hpp"
#include "nuweak/quadrature.hpp"
#include "oracle_helpers.hpp"

using namespace nuweak;
using Catch::Approx;

namespace {

QuantumState random_state(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<complexd> c(dim);
  for (auto& x : c) x = complexd(g(rng), g(rng));
  return QuantumState(c);
}

Observable random_hermitian(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<complexd> m(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m[i * dim + i] = complexd(g(rng), 0.0);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const complexd v(g(rng), g(rng));
      m[i * dim + j] = v;
      m[j * dim + i] = std::conj(v);
    }
  }
  return Observable(dim, m);
}

}  // namespace

TEST_CASE("observable: hermiticity enforced, eigensystem reconstructs") {
  CHECK_THROWS_AS(Observable(2, {complexd(0), complexd(1, 0.5), complexd(1),
                                 complexd(0)}),
                  std::invalid_argument);
  std::mt19937_64 rng(11);
  const auto obs = random_hermitian(rng, 3);
  // sum_k a_k |e_k><e_k| must give back the matrix
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      complexd rebuilt;
      for (std::size_t k = 0; k < 3; ++k) {
        std::vector<complexd> e_i(3), e_j(3);
        e_i[i] = 1.0;
        e_j[j] = 1.0;
        // (e_k)_i = conj(<e_k|basis_i>)
        rebuilt += obs.eigenvalue(k) *
                   std::conj(obs.eigenvector_overlap(k, QuantumState(e_i))) *
                   obs.eigenvector_overlap(k, QuantumState(e_j));
      }
      CHECK(std::abs(rebuilt - obs.entry(i, j)) < 1e-10);
    }
  }
}

TEST_CASE("measurement regime: ratio and tags") {
  const auto obs = Observable::diagonal({-1.0, 1.0});
  const auto strong = measurement_regime(obs, GaussianPointer{0.01, 0.0});
  CHECK(strong.ratio == Approx(0.005));
  CHECK(strong.tag == MeasurementRegime::strong);

  const auto weak = measurement_regime(obs, GaussianPointer{100.0, 0.0});
  CHECK(weak.ratio == Approx(50.0));
  CHECK(weak.tag == MeasurementRegime::weak);

  const auto mid = measurement_regime(obs, GaussianPointer{2.0, 0.0});
  CHECK(mid.tag == MeasurementRegime::intermediate);

  const auto degenerate =
      measurement_regime(Observable::diagonal({1.0, 1.0}),
                         GaussianPointer{0.01, 0.0});
  CHECK(degenerate.tag == MeasurementRegime::weak);
  CHECK(std::isnan(degenerate.ratio));
}

TEST_CASE("strong distribution: eigenstate input gives a single gaussian") {
  const auto obs = Observable::diagonal({-1.0, 2.0});
  const GaussianPointer ptr{0.2, 0.0};
  const QuantumState psi({complexd(0.0), complexd(1.0)});
  for (double p : {1.0, 1.8, 2.0, 2.6}) {
    CHECK(pointer_distribution_strong(psi, obs, ptr, p) ==
          Approx(ptr.density(p - 2.0)).epsilon(1e-13));
  }
}

TEST_CASE("strong distribution: equal superposition is an equal-weight "
          "bimodal mixture") {
  const auto obs = Observable::diagonal({-1.0, 1.0});
  const GaussianPointer ptr{0.1, 0.0};
  const double r = 1.0 / std::sqrt(2.0);
  const QuantumState psi({complexd(r), complexd(r)});
  CHECK(pointer_distribution_strong(psi, obs, ptr, 1.0) ==
        Approx(pointer_distribution_strong(psi, obs, ptr, -1.0))
            .epsilon(1e-13));
  CHECK(pointer_distribution_strong(psi, obs, ptr, 1.0) ==
        Approx(0.5 * ptr.density(0.0)).epsilon(1e-6));
}

TEST_CASE("strong distribution: normalizes to one for random 3-dim states") {
  std::mt19937_64 rng(5);
  const auto obs = random_hermitian(rng, 3);
  const auto psi = random_state(rng, 3);
  for (double sigma : {0.05, 0.7, 9.0}) {
    const GaussianPointer ptr{sigma, 0.0};
    const double reach = 15.0 * sigma + 10.0;
    const double norm = quadrature::integrate(
        [&](double p) {
          return pointer_distribution_strong(psi, obs, ptr, p);
        },
        -reach, reach, 4096);
    CHECK(norm == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("weak value: eigenstate recovery") {
  std::mt19937_64 rng(17);
  const auto obs = random_hermitian(rng, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<complexd> e(3);
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<complexd> basis(3);
      basis[i] = 1.0;
      e[i] = std::conj(obs.eigenvector_overlap(k, QuantumState(basis)));
    }
    const QuantumState ek(e);
    const complexd aw = weak_value(ek, ek, obs);
    CHECK(aw.real() == Approx(obs.eigenvalue(k)).margin(1e-12));
    CHECK(std::abs(aw.imag()) < 1e-12);
  }
}

TEST_CASE("weak value: anomalous 2-dim example cos(a-b)/cos(a+b)") {
  const auto obs = Observable::diagonal({1.0, -1.0});
  const double a = 0.7, b = 0.7;
  const QuantumState psi_i({complexd(std::cos(a)), complexd(std::sin(a))});
  const QuantumState psi_f({complexd(std::cos(b)), complexd(-std::sin(b))});
  const complexd aw = weak_value(psi_i, psi_f, obs);
  const double want = std::cos(a - b) / std::cos(a + b);
  CHECK(aw.real() == Approx(want).epsilon(1e-12));
  CHECK(want == Approx(5.8835).epsilon(1e-3));
  CHECK(aw.real() > 1.0);  // outside the spectrum {-1, +1}
}

TEST_CASE("weak value: orthogonal post-selection is an error") {
  const auto obs = Observable::diagonal({1.0, -1.0});
  const QuantumState psi_i({complexd(1.0), complexd(0.0)});
  const QuantumState psi_f({complexd(0.0), complexd(1.0)});
  CHECK_THROWS_AS(weak_value(psi_i, psi_f, obs), near_orthogonal_error);
}

TEST_CASE("weak value: reduces to the expectation value when psi_f = psi_i") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const auto obs = random_hermitian(rng, 3);
    const auto psi = random_state(rng, 3);
    const complexd aw = weak_value(psi, psi, obs);
    const complexd direct = obs.matrix_element_power(psi, psi, 1);
    CHECK(std::abs(aw - direct) < 1e-12);
    CHECK(std::abs(aw.imag()) < 1e-12);
  }
}

TEST_CASE("weak value: invariant under global phases of either state") {
  std::mt19937_64 rng(29);
  const auto obs = random_hermitian(rng, 3);
  const auto psi_i = random_state(rng, 3);
  const auto psi_f = random_state(rng, 3);
  const complexd base = weak_value(psi_i, psi_f, obs);
  for (double phi : {0.3, 1.9, 4.4}) {
    std::vector<complexd> ci, cf;
    for (std::size_t k = 0; k < 3; ++k) {
      ci.push_back(psi_i[k] * std::polar(1.0, phi));
      cf.push_back(psi_f[k] * std::polar(1.0, -2.0 * phi));
    }
    const complexd rotated =
        weak_value(QuantumState(ci), QuantumState(cf), obs);
    CHECK(std::abs(rotated - base) < 1e-12);
  }
}

TEST_CASE("weak value: second order exposed as data") {
  const auto obs = Observable::diagonal({1.0, -1.0});
  const QuantumState psi_i({complexd(std::cos(0.7)), complexd(std::sin(0.7))});
  const QuantumState psi_f({complexd(std::cos(0.7)),
                            complexd(-std::sin(0.7))});
  // A^2 = identity here, so the second-order weak value is exactly 1 even
  // though the first-order one is anomalous.
  const complexd aw2 = weak_value(psi_i, psi_f, obs, 2);
  CHECK(aw2.real() == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(aw2.imag()) < 1e-12);
}

TEST_CASE("weak postselected distribution: eigenstate pre = post") {
  const auto obs = Observable::diagonal({-3.0, 4.0});
  const GaussianPointer ptr{25.0, 0.0};
  const QuantumState ek({complexd(0.0), complexd(1.0)});
  const auto s = pointer_distribution_weak_postselected(ek, ek, obs, ptr, 5.0);
  CHECK(s.density == Approx(ptr.density(5.0 - 4.0)).epsilon(1e-12));
  CHECK(std::abs(s.weak_value - complexd(4.0)) < 1e-12);
}

TEST_CASE("weak postselected distribution: anomalous center far outside the "
          "spectrum") {
  const auto obs = Observable::diagonal({1.0, -1.0});
  const GaussianPointer ptr{40.0, 0.0};
  const double a = 0.7;
  const QuantumState psi_i({complexd(std::cos(a)), complexd(std::sin(a))});
  const QuantumState psi_f({complexd(std::cos(a)), complexd(-std::sin(a))});
  const double aw = std::cos(0.0) / std::cos(2.0 * a);
  // density profile is a gaussian centered at the weak value
  const auto at = [&](double p) {
    return pointer_distribution_weak_postselected(psi_i, psi_f, obs, ptr, p)
        .density;
  };
  CHECK(at(aw + 0.5) == Approx(at(aw - 0.5)).epsilon(1e-12));
  CHECK(at(aw) > at(aw + 3.0));
  CHECK(at(aw) > at(0.0));
}

TEST_CASE("weak postselected distribution: mean tracks Re A_w against the "
          "exact propagator") {
  const auto obs = Observable::diagonal({1.0, -1.0});
  const double a = 0.7;
  const QuantumState psi_i({complexd(std::cos(a)), complexd(std::sin(a))});
  const QuantumState psi_f({complexd(std::cos(a)), complexd(-std::sin(a))});
  const double aw = 1.0 / std::cos(2.0 * a);
  const double delta_a = 2.0;  // spectrum spacing
  for (double sigma : {10.0, 30.0, 90.0}) {
    const GaussianPointer ptr{sigma, 0.0};
    const double mean = oracle::exact_postselected_mean(psi_i, psi_f, obs, ptr);
    const double ratio = delta_a / sigma;
    CHECK(std::abs(mean - aw) / std::abs(aw) < 5.0 * ratio * ratio);
  }
}

TEST_CASE("pointer expectation: eigenstate and symmetric superposition") {
  const auto obs = Observable::diagonal({0.0, 1.0});
  const QuantumState ek({complexd(0.0), complexd(1.0)});
  const double r = 1.0 / std::sqrt(2.0);
  const QuantumState sym({complexd(r), complexd(r)});
  for (double sigma : {0.01, 1.0, 100.0}) {
    const GaussianPointer ptr{sigma, 0.0};
    CHECK(pointer_expectation(ek, obs, ptr) == Approx(1.0).margin(1e-14));
    CHECK(pointer_expectation(sym, obs, ptr) == Approx(0.5).margin(1e-14));
  }
}

TEST_CASE("pointer expectation: matches the direct matrix element for random "
          "states across three decades of sigma_p") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto obs = random_hermitian(rng, 3);
    const auto psi = random_state(rng, 3);
    const double direct = obs.matrix_element_power(psi, psi, 1).real();
    for (double sigma : {0.01, 1.0, 100.0}) {
      const GaussianPointer ptr{sigma, 0.0};
      CHECK(pointer_expectation(psi, obs, ptr) ==
            Approx(direct).margin(1e-10));
    }
  }
}

TEST_CASE("first-order pointer shift error shrinks quadratically in "
          "delta_a / sigma_p") {
  const auto obs = Observable::diagonal({1.0, -1.0});
  const double a = 0.7;
  const QuantumState psi_i({complexd(std::cos(a)), complexd(std::sin(a))});
  const QuantumState psi_f({complexd(std::cos(a)), complexd(-std::sin(a))});
  const double aw = 1.0 / std::cos(2.0 * a);
  std::vector<double> logs_x, logs_e;
  for (double sigma : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    const GaussianPointer ptr{sigma, 0.0};
    const double mean = oracle::exact_postselected_mean(psi_i, psi_f, obs, ptr);
    logs_x.push_back(std::log(2.0 / sigma));
    logs_e.push_back(std::log(std::abs(mean - aw)));
  }
  // least-squares slope of log error vs log(delta_a / sigma_p)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = logs_x.size();
  for (std::size_t i = 0; i < logs_x.size(); ++i) {
    sx += logs_x[i];
    sy += logs_e[i];
    sxx += logs_x[i] * logs_x[i];
    sxy += logs_x[i] * logs_e[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == Approx(2.0).margin(0.25));
}
