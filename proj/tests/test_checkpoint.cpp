#include <doctest.h>

#include "mekbrec/checkpoint.hpp"
#include "mekbrec/error.hpp"
#include "support.hpp"

using namespace mekb;

TEST_CASE("checkpoint round-trip is bit exact") {
  const auto dir = testsupport::scratch("ckpt");
  EncoderConfig c;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_model = 8;
  c.d_ffn = 12;
  c.k_dim = 4;
  c.n_max = 10;
  c.vocab_size = 25;
  c.mlp_hidden = 6;
  c.seed = 77;
  Checkpoint ck{c, init_encoder(c), ItemTower::init({"b", "a", "c"}, c.k_dim, 3)};
  ck.params.proj_b(0, 1) = 1.0 / 3.0;

  const auto p1 = (dir / "one.ckpt").string();
  const auto p2 = (dir / "two.ckpt").string();
  save_checkpoint(ck, p1);
  const Checkpoint back = load_checkpoint(p1);
  save_checkpoint(back, p2);
  CHECK(testsupport::read_file(p1) == testsupport::read_file(p2));
  CHECK(back.config == c);
  CHECK(back.tower == ck.tower);
  auto a = ck.params.tensors();
  const auto& bp = back.params;
  auto b = const_cast<EncoderParams&>(bp).tensors();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(*a[i].value == *b[i].value);
  }
}

TEST_CASE("checkpoint without a tower and corrupted containers") {
  EncoderConfig c;
  c.n_layers = 1;
  c.n_heads = 1;
  c.d_model = 4;
  c.d_ffn = 4;
  c.k_dim = 2;
  c.n_max = 3;
  c.vocab_size = 6;
  const Checkpoint ck{c, init_encoder(c), std::nullopt};
  const std::string bytes = serialize_checkpoint(ck);
  CHECK_FALSE(deserialize_checkpoint(bytes).tower.has_value());
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() / 2)), ParseError);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_checkpoint(bad), ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/x.ckpt"), InputError);
}
