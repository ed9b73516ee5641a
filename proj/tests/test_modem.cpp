/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "detlab/modem.hpp"
#include "detlab/rng.hpp"

using namespace detlab;

namespace {

bitvec random_bits(std::size_t n, Rng& rng) {
    bitvec b(n);
    for (auto& x : b)
        x = static_cast<std::uint8_t>(rng.bit());
    return b;
}

int hamming(std::uint32_t a, std::uint32_t b) {
    std::uint32_t d = a ^ b;
    int n = 0;
    while (d) {
        n += static_cast<int>(d & 1u);
        d >>= 1;
    }
    return n;
}

} // namespace

TEST_CASE("constellations are unit energy with distinct gray labels") {
    for (const Constellation* c :
         {&Constellation::bpsk(), &Constellation::qpsk(), &Constellation::qam16()}) {
        CHECK(c->points.size() == (1u << c->k));
        double energy = 0.0;
        std::set<std::uint32_t> labs;
        for (std::size_t i = 0; i < c->size(); ++i) {
            energy += std::norm(c->points[i]);
            labs.insert(c->labels[i]);
        }
        energy /= static_cast<double>(c->size());
        CHECK(energy == Catch::Approx(1.0).margin(1e-12));
        CHECK(labs.size() == c->size()); // distinct

        // Gray property: every nearest-neighbor pair differs in one bit.
        double dmin = 1e30;
        for (std::size_t i = 0; i < c->size(); ++i)
            for (std::size_t j = i + 1; j < c->size(); ++j)
                dmin = std::min(dmin, std::abs(c->points[i] - c->points[j]));
        for (std::size_t i = 0; i < c->size(); ++i)
            for (std::size_t j = i + 1; j < c->size(); ++j)
                if (std::abs(c->points[i] - c->points[j]) < dmin * 1.001)
                    CHECK(hamming(c->labels[i], c->labels[j]) == 1);
    }
}

TEST_CASE("modulate: fixed mappings") {
    const bitvec b01 = {0, 1};
    const cvec bp = modulate(b01, Constellation::bpsk());
    REQUIRE(bp.size() == 2);
    CHECK(bp[0] == cplx(1.0, 0.0));
    CHECK(bp[1] == cplx(-1.0, 0.0));

    const bitvec b00 = {0, 0};
    const cvec qp = modulate(b00, Constellation::qpsk());
    REQUIRE(qp.size() == 1);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(qp[0].real() == Catch::Approx(s));
    CHECK(qp[0].imag() == Catch::Approx(s));
}

TEST_CASE("modulate: all 16 qam labels give distinct points, mean energy 1") {
    bitvec all;
    for (std::uint32_t lab = 0; lab < 16; ++lab)
        for (int b = 3; b >= 0; --b)
            all.push_back(static_cast<std::uint8_t>((lab >> b) & 1u));
    const cvec pts = modulate(all, Constellation::qam16());
    REQUIRE(pts.size() == 16);
    std::set<std::pair<double, double>> uniq;
    double energy = 0.0;
    for (const cplx& p : pts) {
        uniq.insert({p.real(), p.imag()});
        energy += std::norm(p);
    }
    CHECK(uniq.size() == 16);
    CHECK(energy / 16.0 == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("modulate rejects ragged bit counts") {
    CHECK_THROWS_AS(modulate(bitvec{0, 1, 0}, Constellation::qpsk()), LengthMismatch);
}

TEST_CASE("slice: decisions and tie break") {
    const Constellation& b = Constellation::bpsk();
    CHECK(slice(cplx(0.3, 0.0), b) == cplx(1.0, 0.0));
    CHECK(slice(cplx(0.0, 0.0), b) == cplx(1.0, 0.0)); // tie -> lowest index
    const Constellation& q = Constellation::qpsk();
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(slice(cplx(2.0, 2.0), q) == cplx(s, s));
}

TEST_CASE("demodulate: fixed decisions") {
    const Constellation& b = Constellation::bpsk();
    const cvec noisy = {cplx(-0.1, 0.0), cplx(0.1, 0.0)};
    CHECK(demodulate(noisy, b) == bitvec{1, 0});

    const Constellation& q = Constellation::qpsk();
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(demodulate(cvec{cplx(-s, -s)}, q) == bitvec{1, 1});
}

TEST_CASE("round trip over random bits for every constellation") {
    Rng rng(101);
    for (const Constellation* c :
         {&Constellation::bpsk(), &Constellation::qpsk(), &Constellation::qam16()}) {
        const bitvec bits = random_bits(1000 * static_cast<std::size_t>(c->k), rng);
        CHECK(demodulate(modulate(bits, *c), *c) == bits);
    }
}

TEST_CASE("empirical symbol energy over random bits") {
    Rng rng(103);
    for (const Constellation* c :
         {&Constellation::bpsk(), &Constellation::qpsk(), &Constellation::qam16()}) {
        const bitvec bits = random_bits(10000 * static_cast<std::size_t>(c->k), rng);
        const cvec syms = modulate(bits, *c);
        double e = 0.0;
        for (const cplx& s : syms)
            e += std::norm(s);
        e /= static_cast<double>(syms.size());
        CHECK(e == Catch::Approx(1.0).margin(0.02));
    }
}

TEST_CASE("constellation lookup by name") {
    CHECK(Constellation::by_name("bpsk").k == 1);
    CHECK(Constellation::by_name("qpsk").k == 2);
    CHECK(Constellation::by_name("qam16").k == 4);
    CHECK_THROWS_AS(Constellation::by_name("qam64"), ValidationError);
}
