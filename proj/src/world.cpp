#include "bci/world.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "bci/rng.hpp"

namespace bci {

namespace {
void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string("world: ") + what +
                                " has wrong length");
}
}  // namespace

PotentialOutcomeWorld PotentialOutcomeWorld::linear(
    InterferenceMapping mapping, std::vector<double> intercepts,
    std::vector<std::vector<double>> coefs) {
  const std::size_t M = mapping.num_outcome;
  require_size(intercepts.size(), M, "intercepts");
  require_size(coefs.size(), M, "coefs");
  for (std::size_t j = 0; j < M; ++j)
    require_size(coefs[j].size(), mapping.rows[j].size(), "coefs row");
  PotentialOutcomeWorld w(std::move(mapping));
  w.family_ = WorldFamily::Linear;
  w.intercepts_ = std::move(intercepts);
  w.coefs_ = std::move(coefs);
  return w;
}

PotentialOutcomeWorld PotentialOutcomeWorld::interactive(
    InterferenceMapping mapping, std::vector<double> intercepts,
    std::vector<std::vector<double>> coefs, std::vector<double> gamma) {
  auto w = linear(std::move(mapping), std::move(intercepts), std::move(coefs));
  require_size(gamma.size(), w.mapping_.rows.size(), "gamma");
  w.family_ = WorldFamily::Interactive;
  w.gamma_ = std::move(gamma);
  return w;
}

PotentialOutcomeWorld PotentialOutcomeWorld::threshold(
    InterferenceMapping mapping, std::vector<double> scale,
    std::vector<int> q) {
  const std::size_t M = mapping.num_outcome;
  require_size(scale.size(), M, "scale");
  require_size(q.size(), M, "q");
  PotentialOutcomeWorld w(std::move(mapping));
  w.family_ = WorldFamily::Threshold;
  w.scale_ = std::move(scale);
  w.q_ = std::move(q);
  return w;
}

PotentialOutcomeWorld PotentialOutcomeWorld::table(
    InterferenceMapping mapping, std::vector<std::vector<double>> tables) {
  const std::size_t M = mapping.num_outcome;
  require_size(tables.size(), M, "tables");
  for (std::size_t j = 0; j < M; ++j) {
    const std::size_t deg = mapping.rows[j].size();
    if (deg > 30) throw std::invalid_argument("world: table row too wide");
    require_size(tables[j].size(), std::size_t{1} << deg, "table row");
  }
  PotentialOutcomeWorld w(std::move(mapping));
  w.family_ = WorldFamily::Table;
  w.tables_ = std::move(tables);
  return w;
}

double PotentialOutcomeWorld::outcome(int j, std::uint64_t code) const {
  const int deg = static_cast<int>(mapping_.rows[j].size());
  switch (family_) {
    case WorldFamily::Table:
      return tables_[j][code];
    case WorldFamily::Linear:
    case WorldFamily::Interactive: {
      double y = intercepts_[j];
      for (int b = 0; b < deg; ++b)
        if ((code >> b) & 1u) y += coefs_[j][b];
      if (family_ == WorldFamily::Interactive) {
        const int t = std::popcount(code);
        y += gamma_[j] * (t * (t - 1) / 2);
      }
      return y;
    }
    case WorldFamily::Threshold:
      return std::popcount(code) >= q_[j] ? scale_[j] : 0.0;
  }
  return 0.0;
}

double PotentialOutcomeWorld::outcome_global(
    int j, const std::vector<std::uint8_t>& a) const {
  std::uint64_t code = 0;
  const auto& tj = mapping_.rows[j];
  for (std::size_t b = 0; b < tj.size(); ++b)
    if (a[tj[b]]) code |= std::uint64_t{1} << b;
  return outcome(j, code);
}

SutvaCheck verify_structured_sutva(
    const InterferenceMapping& mapping,
    const std::function<double(int, const std::vector<std::uint8_t>&)>& fn,
    int cap) {
  const int P = mapping.num_interventional;
  if (P > cap)
    throw std::invalid_argument(
        "verify_structured_sutva: P exceeds exhaustive cap; use the sampled "
        "variant");
  SutvaCheck out;
  std::vector<std::uint8_t> a(P), base(P);
  for (int j = 0; j < mapping.num_outcome; ++j) {
    const auto& tj = mapping.rows[j];
    std::vector<int> outside;
    for (int i = 0; i < P; ++i)
      if (!std::binary_search(tj.begin(), tj.end(), i)) outside.push_back(i);
    const int nr = static_cast<int>(tj.size());
    const int nc = static_cast<int>(outside.size());
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << nr); ++r) {
      std::fill(base.begin(), base.end(), 0);
      for (int b = 0; b < nr; ++b)
        if ((r >> b) & 1u) base[tj[b]] = 1;
      const double y0 = fn(j, base);
      for (std::uint64_t c = 1; c < (std::uint64_t{1} << nc); ++c) {
        a = base;
        for (int b = 0; b < nc; ++b)
          if ((c >> b) & 1u) a[outside[b]] = 1;
        if (fn(j, a) != y0) {
          out.ok = false;
          out.j = j;
          out.a = base;
          out.a2 = a;
          return out;
        }
      }
    }
  }
  return out;
}

SutvaCheck verify_structured_sutva_sampled(
    const InterferenceMapping& mapping,
    const std::function<double(int, const std::vector<std::uint8_t>&)>& fn,
    int pairs, std::uint64_t seed) {
  const int P = mapping.num_interventional;
  SutvaCheck out;
  std::vector<std::uint8_t> a(P), a2(P);
  for (int j = 0; j < mapping.num_outcome; ++j) {
    const auto& tj = mapping.rows[j];
    auto eng = make_engine(seed, static_cast<std::uint64_t>(j));
    std::bernoulli_distribution coin(0.5);
    for (int r = 0; r < pairs; ++r) {
      for (int i = 0; i < P; ++i) {
        a[i] = coin(eng) ? 1 : 0;
        a2[i] = coin(eng) ? 1 : 0;
      }
      for (int i : tj) a2[i] = a[i];
      if (fn(j, a) != fn(j, a2)) {
        out.ok = false;
        out.j = j;
        out.a = a;
        out.a2 = a2;
        return out;
      }
    }
  }
  return out;
}

}  // namespace bci
