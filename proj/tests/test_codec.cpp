#include <doctest.h>

#include <cmath>

#include "dfs/codec.hpp"
#include "dfs/dataset.hpp"
#include "dfs/evaluation.hpp"
#include "dfs/numerics.hpp"
#include "dfs/rng.hpp"

using namespace dfs;

namespace {

Condition cond(int label) { return make_condition(label, 8, 5); }

}  // namespace

TEST_CASE("identity-initialized codec round-trips exactly without training") {
    std::vector<Latent> data = {{1.5, -2.0}, {0.0, 3.0}, {4.0, 4.0}};
    RngStream rng(1, "codec");
    const Codec c = train_codec(data, 2, 0, rng, cond(0));
    for (const Latent& x : data) {
        const Latent z = encode(c, x);
        CHECK(z == x);
        CHECK(decode(c, z) == x);
    }
}

TEST_CASE("encode is linear when biases are zero") {
    std::vector<Latent> data;
    RngStream drng(2, "data");
    for (int i = 0; i < 12; ++i) data.push_back(normal_vector(drng, 6));
    RngStream rng(3, "codec");
    const Codec c = train_codec(data, 3, 0, rng, cond(0));  // untrained, zero bias

    const Latent x = normal_vector(drng, 6);
    const Latent y = normal_vector(drng, 6);
    Latent mix(6);
    for (int i = 0; i < 6; ++i) mix[i] = 2.0 * x[i] - 0.5 * y[i];
    const Latent zx = encode(c, x);
    const Latent zy = encode(c, y);
    const Latent zm = encode(c, mix);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(zm[i] == doctest::Approx(2.0 * zx[i] - 0.5 * zy[i]).epsilon(1e-12));
}

TEST_CASE("training the codec is deterministic given the stream") {
    std::vector<Latent> data;
    RngStream drng(4, "data");
    for (int i = 0; i < 40; ++i) data.push_back(normal_vector(drng, 8));
    RngStream r1(5, "codec");
    RngStream r2(5, "codec");
    const Codec a = train_codec(data, 3, 20, r1, cond(0));
    const Codec b = train_codec(data, 3, 20, r2, cond(0));
    CHECK(a.enc_w == b.enc_w);
    CHECK(a.dec_w == b.dec_w);
    CHECK(a.enc_b == b.enc_b);
    CHECK(a.dec_b == b.dec_b);
    CHECK(a.representative == b.representative);
}

TEST_CASE("codec contract violations raise invalid-argument") {
    RngStream rng(6, "codec");
    std::vector<Latent> data = {{1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(train_codec({}, 2, 10, rng, cond(0)), std::invalid_argument);
    CHECK_THROWS_AS(train_codec(data, 4, 10, rng, cond(0)), std::invalid_argument);

    const Codec c = train_codec(data, 2, 0, rng, cond(0));
    CHECK_THROWS_AS(encode(c, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(decode(c, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("selection returns the argmax membership with lowest-index ties") {
    std::vector<Latent> d0 = {{1.0, 0.0}};
    CodecRegistry reg;
    reg.codecs.push_back(identity_codec(2, {1.0, 0.0}, cond(0)));

    // M=1: always index 0.
    const auto single = select_codec(reg, {0.3, -5.0}, cond(1));
    CHECK(single.first == 0);
    CHECK(single.second.size() == 1);

    reg.codecs.push_back(identity_codec(2, {0.0, 1.0}, cond(1)));
    // x equal to a representative with the matching label scores 1.
    const auto hit = select_codec(reg, {0.0, 1.0}, cond(1));
    CHECK(hit.first == 1);
    CHECK(hit.second[1] == doctest::Approx(1.0));
    // argmax contract
    CHECK(hit.second[1] >= hit.second[0]);

    // Identical representatives and labels tie; index 0 wins.
    CodecRegistry twins;
    twins.codecs.push_back(identity_codec(2, {2.0, 2.0}, cond(0)));
    twins.codecs.push_back(identity_codec(2, {2.0, 2.0}, cond(0)));
    CHECK(select_codec(twins, {1.0, 1.0}, cond(0)).first == 0);

    CHECK_THROWS_AS(select_codec(reg, {1.0, 2.0, 3.0}, cond(0)),
                    std::invalid_argument);
}

TEST_CASE("trained shapes16 codec reaches 25 dB on held-out samples") {
    DatasetDescriptor desc;
    desc.kind = DatasetDescriptor::Kind::Shapes16;
    desc.shapes.n_per_class = 60;
    desc.shapes.noise = 0.02;
    const SampleSet train_set = gen_data(desc, 21);
    const SampleSet holdout = gen_data(desc, 22);

    RngStream rng(7, "codec");
    const Codec c = train_codec(train_set.rows(), 16, 200, rng, cond(0));

    double acc = 0.0;
    std::size_t finite_rows = 0;
    for (std::size_t i = 0; i < holdout.size(); ++i) {
        const Latent x = holdout.samples.row(i);
        const Latent z = encode(c, x);
        for (double v : z) CHECK(std::isfinite(v));
        const double db = psnr(x, decode(c, z), 1.0);
        if (std::isfinite(db)) {
            acc += db;
            ++finite_rows;
        }
    }
    const double mean_psnr = acc / static_cast<double>(finite_rows);
    CHECK(mean_psnr >= 25.0);
}
