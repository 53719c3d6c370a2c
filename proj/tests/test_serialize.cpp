#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "lizkit/serialize.hpp"
#include "support/approx.hpp"

using namespace lizkit;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!same_bits(a[i], b[i])) return false;
  return true;
}

Model through_text(const Model& m) { return model_from_json(Json::parse(to_json(m).dump(2))); }

}  // namespace

TEST_CASE("property: models survive a JSON round trip bit for bit") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    SplineModel s{PeriodicFamily{1.0 + 3.0 * u(rng), 0.1 + 9.0 * u(rng), 64 + rep}, g(rng) * 1e3, {}};
    for (int k = 0; k < 6; ++k) s.atoms.push_back({g(rng) * std::pow(10.0, rep % 7 - 3), u(rng) * s.family.period});
    const SplineModel s2 = std::get<SplineModel>(through_text(s));
    CHECK(same_bits(s2.offset, s.offset));
    CHECK(same_bits(s2.family.alpha, s.family.alpha));
    CHECK(same_bits(s2.family.period, s.family.period));
    CHECK(s2.family.order == s.family.order);
    REQUIRE(s2.atoms.size() == s.atoms.size());
    for (std::size_t k = 0; k < s.atoms.size(); ++k) {
      CHECK(same_bits(s2.atoms[k].weight, s.atoms[k].weight));
      CHECK(same_bits(s2.atoms[k].location, s.atoms[k].location));
    }

    LizSplineModel l{FracLapFamily{2.0 + u(rng), 2}, {}};
    for (int k = 0; k < 4; ++k) l.atoms.push_back({g(rng), Eigen::Vector2d(g(rng), g(rng))});
    const LizSplineModel l2 = std::get<LizSplineModel>(through_text(l));
    CHECK(same_bits(l2.family.alpha, l.family.alpha));
    for (std::size_t k = 0; k < l.atoms.size(); ++k) {
      CHECK(same_bits(l2.atoms[k].weight, l.atoms[k].weight));
      CHECK(same_bits(l2.atoms[k].location, l.atoms[k].location));
    }

    RidgeModel r{RidgeFamily{2, 2, rep % 2 == 0}, {}, Eigen::VectorXd()};
    if (r.family.polynomial) r.poly = Eigen::Vector3d(g(rng), g(rng), g(rng));
    for (int k = 0; k < 5; ++k) {
      const double th = 2 * M_PI * u(rng);
      r.atoms.push_back({g(rng), g(rng), Eigen::Vector2d(std::cos(th), std::sin(th))});
    }
    const RidgeModel r2 = std::get<RidgeModel>(through_text(r));
    CHECK(r2.family.polynomial == r.family.polynomial);
    CHECK(same_bits(r2.poly, r.poly));
    for (std::size_t k = 0; k < r.atoms.size(); ++k) {
      CHECK(same_bits(r2.atoms[k].weight, r.atoms[k].weight));
      CHECK(same_bits(r2.atoms[k].offset, r.atoms[k].offset));
      CHECK(same_bits(r2.atoms[k].direction, r.atoms[k].direction));
    }
  }
}

TEST_CASE("model JSON layout") {
  const SplineModel s{PeriodicFamily{2.0, 1.0, 512}, 0.25, {{1.5, 0.2}}};
  const Json j = to_json(s);
  CHECK(j["family"] == "periodic");
  CHECK(j["params"]["alpha"] == 2.0);
  CHECK(j["offset"] == 0.25);
  CHECK(j["atoms"] == Json::parse("[[1.5, 0.2]]"));

  const RidgeModel r{RidgeFamily{2, 2, false}, {{1.0, -0.5, Eigen::Vector2d(0, 1)}}, Eigen::VectorXd()};
  const Json jr = to_json(r);
  CHECK(jr["family"] == "ridge");
  CHECK(jr["atoms"] == Json::parse("[[1.0, -0.5, 0.0, 1.0]]"));
  CHECK(jr["poly"].empty());
}

TEST_CASE("schema violations are reported") {
  const Json good = Json::parse(R"({"family": "periodic", "params": {"alpha": 2, "period": 1}, "offset": 0, "atoms": [[1, 0.5]]})");
  CHECK_NOTHROW(model_from_json(good));
  CHECK(std::get<SplineModel>(model_from_json(good)).family.order == kDefaultTruncation);

  Json j = good;
  j.erase("atoms");
  CHECK_THROWS_KIND(model_from_json(j), errc::kSchemaMismatch);
  j = good;
  j["atoms"] = Json::parse("[[1, 0.5, 3]]");
  CHECK_THROWS_KIND(model_from_json(j), errc::kSchemaMismatch);
  j = good;
  j["family"] = "spline";
  CHECK_THROWS_KIND(model_from_json(j), errc::kSchemaMismatch);
  j = good;
  j["params"].erase("alpha");
  CHECK_THROWS_KIND(model_from_json(j), errc::kSchemaMismatch);
  j = good;
  j["atoms"] = Json::parse(R"([["a", 0.5]])");
  CHECK_THROWS_KIND(model_from_json(j), errc::kSchemaMismatch);

  const Json ridge = Json::parse(R"({"family": "ridge", "params": {"m": 2, "d": 2, "polynomial": false}, "poly": [1, 2, 3], "atoms": []})");
  CHECK_THROWS_KIND(model_from_json(ridge), errc::kSchemaMismatch);
  Json rp = ridge;
  rp["params"]["polynomial"] = true;
  CHECK_NOTHROW(model_from_json(rp));
  rp["poly"] = Json::parse("[1, 2]");
  CHECK_THROWS_KIND(model_from_json(rp), errc::kSchemaMismatch);
  rp["params"]["m"] = 1;
  CHECK_THROWS_KIND(model_from_json(rp), errc::kSchemaMismatch);
  Json rd = ridge;
  rd.erase("poly");
  rd["atoms"] = Json::parse("[[1, 0, 1]]");
  CHECK_THROWS_KIND(model_from_json(rd), errc::kSchemaMismatch);
}

TEST_CASE("Fourier series and atomic measures round-trip") {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> g;
  Eigen::VectorXcd c(9);
  c[4] = g(rng);
  for (int n = 1; n <= 4; ++n) {
    c[4 + n] = {g(rng), g(rng)};
    c[4 - n] = std::conj(c[4 + n]);
  }
  const FourierSeries s(2.5, c);
  const FourierSeries s2 = fourier_series_from_json(Json::parse(to_json(s).dump()));
  CHECK(s2.coeffs() == s.coeffs());
  CHECK(s2.period() == 2.5);

  const AtomicMeasure1D mu({{0.3, 0.1}, {-1.25, 0.7}}, 2.0);
  const AtomicMeasure1D mu2 = atomic_measure_from_json(Json::parse(to_json(mu).dump()));
  CHECK(mu2.period() == 2.0);
  REQUIRE(mu2.size() == 2);
  CHECK(mu2.atoms()[1].weight == -1.25);
  CHECK_THROWS_KIND(fourier_series_from_json(Json::parse(R"({"period": 1, "coeffs": [[0, 0], [1, 0]]})")),
                    errc::kSchemaMismatch);
}

TEST_CASE("kernel descriptors") {
  const KernelDescriptor k{"fraclap", 2.5, 0, 1};
  const KernelDescriptor k2 = kernel_descriptor_from_json(to_json(k));
  CHECK(k2.family == "fraclap");
  CHECK(k2.alpha == 2.5);
  CHECK(k2.d == 1);
  CHECK_THROWS_KIND(kernel_descriptor_from_json(Json::parse(R"({"family": "gauss", "alpha": 1, "m": 0, "d": 1})")),
                    errc::kSchemaMismatch);
  CHECK_THROWS_KIND(kernel_descriptor_from_json(Json::parse(R"({"family": "ridge", "alpha": 0, "m": 2.5, "d": 1})")),
                    errc::kSchemaMismatch);
}

TEST_CASE("JSON files") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "lizkit_test_serialize";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "m.json").string();
  const RidgeModel r{RidgeFamily{3, 2, false}, {{0.1, 0.2, Eigen::Vector2d(0.6, 0.8)}}, Eigen::VectorXd()};
  write_json(path, to_json(r));
  const RidgeModel r2 = std::get<RidgeModel>(model_from_json(read_json(path)));
  CHECK(r2.family.m == 3);
  CHECK(r2.atoms[0].direction == r.atoms[0].direction);

  CHECK_THROWS_KIND(read_json((dir / "nope.json").string()), errc::kInputNotFound);
  std::ofstream(dir / "bad.json") << "{\"family\": ";
  CHECK_THROWS_KIND(read_json((dir / "bad.json").string()), errc::kParseError);
  std::filesystem::remove_all(dir);
}
