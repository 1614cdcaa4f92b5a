#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>

#include "raddich/config.hpp"
#include "raddich/io.hpp"
#include "support.hpp"

using namespace raddich;

namespace {
SpectralField awkward_field(Basis basis) {
  CounterRng rng(61, 0, 0);
  return SpectralField::from_function({4, 3}, 2, basis, [&](int k, std::int64_t j, int l) {
    if (k == 0) return cplx(0.1, -1.0 / 3.0);
    if (k == 1 && j == 1 && l == 0) return cplx(std::numeric_limits<double>::denorm_min(), 1e300);
    if (k == 2 && j == 0) return cplx(-0.0, 5e-324);
    return cplx(rng.normal() * std::pow(10.0, rng.uniform(-30, 30)), rng.normal());
  });
}

bool bit_equal(const SpectralField& a, const SpectralField& b) {
  return a.coeffs().size() == b.coeffs().size() &&
         std::memcmp(a.coeffs().data(), b.coeffs().data(), a.coeffs().size() * sizeof(cplx)) == 0;
}
}  // namespace

TEST(Io, FieldJsonRoundTripIsBitExact) {
  auto u = awkward_field(Basis::eigen);
  auto text = io::dump(io::field_to_json(u));
  auto back = io::field_from_json(io::parse_json(text, "test"));
  EXPECT_TRUE(bit_equal(u, back));
  EXPECT_EQ(back.basis(), Basis::eigen);
  EXPECT_EQ(back.spec(), u.spec());
}

TEST(Io, FieldCsvRoundTripIsBitExact) {
  auto u = awkward_field(Basis::canonical);
  auto csv = io::field_to_csv(u);
  EXPECT_EQ(csv.substr(0, 12), "k,j,l,re,im\n");
  auto back = io::field_from_csv(csv, u.spec(), u.d(), Basis::canonical);
  EXPECT_TRUE(bit_equal(u, back));
  EXPECT_EQ(io::field_to_csv(back), csv);
}

TEST(Io, FieldCsvIndexingIsOneBased) {
  SpectralField u({3, 1}, 1, Basis::canonical, {cplx(1), cplx(2), cplx(3), cplx(4)});
  auto csv = io::field_to_csv(u);
  EXPECT_NE(csv.find("1,3,1,4,0\n"), std::string::npos);
  EXPECT_THROW(io::field_from_csv("k,j,l,re,im\n1,0,1,1,0\n", {3, 1}, 1, Basis::canonical), ConfigError);
  EXPECT_THROW(io::field_from_csv("k,j,l,re,im\n0,1,1,1,0\n0,1,1,1,0\n", {3, 1}, 1, Basis::canonical),
               ConfigError);
  EXPECT_THROW(io::field_from_csv("a,b\n", {3, 1}, 1, Basis::canonical), ConfigError);
}

TEST(Io, FieldJsonRejectsBadInput) {
  EXPECT_THROW(io::field_from_json(io::json::parse(R"({"n":3,"K":0,"d":1,"coeffs":[[1,0]],"x":1})")),
               ConfigError);
  EXPECT_THROW(io::field_from_json(io::json::parse(R"({"n":3,"K":1,"d":1,"coeffs":[[1,0]]})")),
               ConfigError);
  EXPECT_THROW(io::field_from_json(io::json::parse(R"({"n":3,"K":0,"d":1,"coeffs":[[1]]})")),
               ConfigError);
}

TEST(Io, SymbolCsv) {
  auto s = sample_symbol(1.0, 4.0, {2.0});
  EXPECT_EQ(io::symbol_to_csv(s),
            "r,gamma_re,gamma_im,dgamma_re,dgamma_im\n2,1.4142135623730951,0,-0.35355339059327373,0\n");
}

TEST(Io, AtomicWrite) {
  auto dir = std::filesystem::temp_directory_path() / "raddich_io_test";
  std::filesystem::create_directories(dir);
  auto p = dir / "out.txt";
  io::write_atomic(p, "first\n");
  io::write_atomic(p, "second\n");
  EXPECT_EQ(io::read_file(p), "second\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  EXPECT_THROW(io::write_atomic(dir / "missing" / "x.txt", "x"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Config, ParsesAndRoundTrips) {
  auto c = RunConfig::parse(R"({"d":2,"V":[[[1,0],[0.5,0.25]],[[0,0],[2,-1]]],"K":3,"seed":7,
                               "format":"json","tolerances":{"rtol":1e-9}})");
  EXPECT_EQ(c.potential.dim(), 2);
  EXPECT_EQ(c.sphere.K, 3);
  EXPECT_EQ(c.sphere.n, 3);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.format, OutputFormat::json);
  EXPECT_EQ(c.tol.rtol, 1e-9);
  EXPECT_EQ(c.potential.entries()(0, 1), cplx(0.5, 0.25));
  auto again = RunConfig::parse(c.to_json().dump());
  EXPECT_EQ(again, c);
  EXPECT_EQ(again.to_json().dump(), c.to_json().dump());
}

TEST(Config, RejectsInvalid) {
  EXPECT_THROW(RunConfig::parse(R"({"d":1,"V":[[[1,0]]],"extra":1})"), ConfigError);
  EXPECT_THROW(RunConfig::parse(R"({"V":[[[1,0]]]})"), ConfigError);
  EXPECT_THROW(RunConfig::parse(R"({"d":2,"V":[[[1,0]]]})"), ConfigError);
  EXPECT_THROW(RunConfig::parse(R"({"d":1,"V":[[[1,0]]],"K":-1})"), ConfigError);
  EXPECT_THROW(RunConfig::parse(R"({"d":1,"V":[[[1,0]]],"format":"xml"})"), ConfigError);
  EXPECT_THROW(RunConfig::parse(R"({"d":1,"V":[[[1,0]]],"tolerances":{"foo":1}})"), ConfigError);
  EXPECT_THROW(RunConfig::parse(R"({"d":1,"V":[[[1,0]]],"tolerances":{"rtol":-1}})"), ConfigError);
  EXPECT_THROW(RunConfig::parse("{not json"), ConfigError);
}
