#include <doctest.h>

#include <cstdio>
#include <random>

#include "dslab/serialize.hpp"
#include "oracles.hpp"

using namespace dslab;

TEST_CASE("round trips are bit-exact") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 30; ++trial) {
    DiscretizedSet s = trial % 2 == 0
                           ? oracle::random_set_1d(6 + static_cast<int>(rng() % 4),
                                                   0.3, rng)
                           : oracle::random_set_2d(5, 17, 23, 0.25, rng);
    DiscretizedSet back = decode_set(encode_set(s));
    CHECK(back.grid() == s.grid());
    CHECK(back.same_cells(s));
  }
}

TEST_CASE("the documented one-cell file is byte-exact") {
  SetBuilder b(GridSpec::line(3, 0, 1));
  b.set(0);
  const std::string expect =
      "DSETv1\ndim=1\nm=3\nox=0\noy=0\nnx=1\nny=1\nenc=raw\n\n" + std::string(1, '\x01');
  CHECK(encode_set(b.build()) == expect);
  CHECK(decode_set(expect).cell_count() == 1);
}

TEST_CASE("three corruption modes raise three distinct errors") {
  SetBuilder b(GridSpec::line(3, 0, 8));
  b.set(2);
  const std::string good = encode_set(b.build());

  std::string bad_magic = good;
  bad_magic.replace(0, 4, "XSET");
  CHECK_THROWS_AS(decode_set(bad_magic), BadMagicError);

  std::string truncated = good.substr(0, good.size() - 1);
  CHECK_THROWS_AS(decode_set(truncated), TruncatedPayloadError);

  std::string mismatched = good + '\x00';  // payload longer than the extent
  CHECK_THROWS_AS(decode_set(mismatched), HeaderMismatchError);

  std::string bad_dim = good;
  bad_dim.replace(bad_dim.find("dim=1"), 5, "dim=5");
  CHECK_THROWS_AS(decode_set(bad_dim), HeaderMismatchError);

  // all three are SetIoError, so callers can catch the family
  CHECK_THROWS_AS(decode_set(bad_magic), SetIoError);
}

TEST_CASE("stray padding bits are a header mismatch") {
  SetBuilder b(GridSpec::line(3, 0, 3));
  b.set(0);
  std::string bytes = encode_set(b.build());
  bytes.back() = static_cast<char>(0xff);  // bits past nx*ny
  CHECK_THROWS_AS(decode_set(bytes), HeaderMismatchError);
}

TEST_CASE("file round trip") {
  std::mt19937_64 rng(127);
  DiscretizedSet s = oracle::random_set_2d(6, 40, 11, 0.4, rng);
  const std::string path = "serialize_test_tmp.dset";
  save_set(s, path);
  DiscretizedSet back = load_set(path);
  CHECK(back.same_cells(s));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_set("does_not_exist.dset"), SetIoError);
}
