#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "joulebits/prob.hpp"
#include "joulebits/rng.hpp"
#include "oracles.hpp"

using namespace joulebits;

namespace {

JointTable random_joint(SplitRng& rng, std::vector<std::string> names,
                        std::vector<std::vector<std::string>> alphabets) {
    JointTable j = JointTable::zeros(std::move(names), std::move(alphabets));
    j.cells = rng.simplex(j.cell_count());
    return j;
}

}  // namespace

TEST_CASE("entropy closed forms") {
    auto u4 = FiniteDistribution::uniform({"a", "b", "c", "d"});
    CHECK(entropy(u4) == Catch::Approx(2.0).margin(1e-15));

    auto point = FiniteDistribution::point_mass({"a", "b", "c"}, 1);
    CHECK(entropy(point) == 0.0);

    FiniteDistribution coin{{"h", "t"}, {0.25, 0.75}};
    CHECK(entropy(coin) ==
          Catch::Approx(0.8112781244591328).margin(1e-15));
}

TEST_CASE("distribution validation") {
    FiniteDistribution bad{{"a", "b"}, {0.6, 0.6}};
    CHECK_THROWS_AS(bad.validate(), validation_error);
    FiniteDistribution neg{{"a", "b"}, {-0.1, 1.1}};
    CHECK_THROWS_AS(neg.validate(), validation_error);
    FiniteDistribution mismatch{{"a", "b"}, {1.0}};
    CHECK_THROWS_AS(mismatch.validate(), validation_error);
    CHECK_THROWS_AS(FiniteDistribution{}.validate(), validation_error);
    FiniteDistribution ok{{"a", "b"}, {0.5, 0.5}};
    CHECK(ok.index_of("b") == 1);
    CHECK_THROWS_AS(ok.index_of("zz"), lookup_error);
}

TEST_CASE("kl divergence") {
    FiniteDistribution p{{"0", "1"}, {0.75, 0.25}};
    FiniteDistribution q{{"0", "1"}, {0.5, 0.5}};
    CHECK(kl_divergence(p, p) == 0.0);
    // 1 - H(3/4)
    CHECK(kl_divergence(p, q) ==
          Catch::Approx(0.18872187554086717).margin(1e-15));

    FiniteDistribution support_gap{{"0", "1"}, {0.0, 1.0}};
    CHECK(std::isinf(kl_divergence(p, support_gap)));
    // zero p-mass on the missing support is fine
    CHECK(kl_divergence(support_gap, q) == Catch::Approx(1.0).margin(1e-15));

    FiniteDistribution other{{"x", "y"}, {0.5, 0.5}};
    CHECK_THROWS_AS(kl_divergence(p, other), validation_error);
}

TEST_CASE("joint table indexing and marginals") {
    JointTable j = JointTable::zeros({"A", "B"}, {{"a0", "a1"}, {"b0", "b1", "b2"}});
    REQUIRE(j.cells.size() == 6);
    // last variable fastest
    j.at({1, 2}) = 0.5;
    CHECK(j.cells[5] == 0.5);
    j.at({0, 0}) = 0.25;
    j.at({0, 1}) = 0.25;
    j.validate();

    auto mb = j.marginal_distribution("B");
    CHECK(mb.probs[0] == Catch::Approx(0.25));
    CHECK(mb.probs[1] == Catch::Approx(0.25));
    CHECK(mb.probs[2] == Catch::Approx(0.5));

    // marginal in reversed order transposes
    JointTable ba = j.marginal({"B", "A"});
    CHECK(ba.at({2, 1}) == 0.5);
    CHECK_THROWS_AS(j.marginal({"C"}), lookup_error);
}

TEST_CASE("joint table validation") {
    JointTable j = JointTable::zeros({"A", "A"}, {{"a"}, {"a2"}});
    j.cells = {1.0};
    CHECK_THROWS_AS(j.validate(), validation_error);

    JointTable dup = JointTable::zeros({"A"}, {{"x", "x"}});
    dup.cells = {0.5, 0.5};
    CHECK_THROWS_AS(dup.validate(), validation_error);

    JointTable unnorm = JointTable::zeros({"A"}, {{"x", "y"}});
    unnorm.cells = {0.7, 0.7};
    CHECK_THROWS_AS(unnorm.validate(), validation_error);
}

TEST_CASE("mutual information matches direct sums") {
    SplitRng rng(7, 0);
    for (int rep = 0; rep < 20; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        JointTable j = random_joint(sub, {"A", "B"},
                                    {{"a0", "a1", "a2"}, {"b0", "b1"}});
        std::vector<std::vector<double>> m(3, std::vector<double>(2));
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 2; ++b) m[a][b] = j.at({a, b});
        CHECK(mutual_information(j, "A", "B") ==
              Catch::Approx(oracle::mi_2d(m)).margin(1e-12));
        // symmetry
        CHECK(mutual_information(j, "B", "A") ==
              Catch::Approx(mutual_information(j, "A", "B")).margin(1e-12));
    }
}

TEST_CASE("mutual information of independent variables is zero") {
    JointTable j = JointTable::zeros({"A", "B"}, {{"a0", "a1"}, {"b0", "b1"}});
    std::vector<double> pa{0.3, 0.7}, pb{0.8, 0.2};
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) j.at({a, b}) = pa[a] * pb[b];
    CHECK(mutual_information(j, "A", "B") == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("conditional mi matches direct sums and the chain identity") {
    SplitRng rng(11, 0);
    for (int rep = 0; rep < 20; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        JointTable j = random_joint(
            sub, {"A", "B", "C"}, {{"a0", "a1"}, {"b0", "b1", "b2"}, {"c0", "c1"}});
        std::vector<std::vector<std::vector<double>>> t(
            2, std::vector<std::vector<double>>(3, std::vector<double>(2)));
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                for (std::size_t c = 0; c < 2; ++c) t[a][b][c] = j.at({a, b, c});
        double cmi = conditional_mi(j, "A", "B", "C");
        CHECK(cmi == Catch::Approx(oracle::cmi_3d(t)).margin(1e-12));

        // I(A;B,C) = I(A;C) + I(A;B|C), with the pair (B,C) flattened by hand
        JointTable pair = JointTable::zeros(
            {"A", "BC"},
            {{"a0", "a1"}, {"b0c0", "b0c1", "b1c0", "b1c1", "b2c0", "b2c1"}});
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                for (std::size_t c = 0; c < 2; ++c)
                    pair.at({a, b * 2 + c}) = j.at({a, b, c});
        double lhs = mutual_information(pair, "A", "BC");
        double rhs = mutual_information(j, "A", "C") + cmi;
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
}

TEST_CASE("conditional mi rejects repeated variables") {
    JointTable j = JointTable::zeros({"A", "B", "C"},
                                     {{"a"}, {"b"}, {"c"}});
    j.cells = {1.0};
    CHECK_THROWS_AS(conditional_mi(j, "A", "A", "C"), validation_error);
    CHECK_THROWS_AS(mutual_information(j, "B", "B"), validation_error);
}

TEST_CASE("quantizer binning") {
    Quantizer q{0.5, 1.0, 4, ClampPolicy::clamp_to_edge};
    q.validate();
    CHECK(q.quantize_one(1.0) == 0);
    CHECK(q.quantize_one(1.49) == 0);
    CHECK(q.quantize_one(1.5) == 1);
    CHECK(q.quantize_one(2.99) == 3);
    CHECK(q.quantize_one(0.2) == 0);    // clamped below
    CHECK(q.quantize_one(50.0) == 3);   // clamped above

    Quantizer strict{0.5, 1.0, 4, ClampPolicy::error};
    CHECK_THROWS_AS(strict.quantize_one(0.2), range_error);
    CHECK_THROWS_AS(strict.quantize_one(3.0), range_error);

    Quantizer bad{0.0, 0.0, 4, ClampPolicy::error};
    CHECK_THROWS_AS(bad.validate(), validation_error);

    auto bins = quantize({1.0, 2.0, 2.6}, q);
    CHECK(bins == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("coarsening an axis never raises mutual information") {
    SplitRng rng(13, 0);
    for (int rep = 0; rep < 20; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        JointTable j = random_joint(
            sub, {"A", "B"}, {{"a0", "a1", "a2"}, {"b0", "b1", "b2", "b3"}});
        double fine = mutual_information(j, "A", "B");
        // random surjection of the four B outcomes onto two bins
        std::vector<std::size_t> to_bin(4);
        for (auto& b : to_bin) b = sub.below(2);
        to_bin[sub.below(4)] = 0;
        to_bin[sub.below(4)] = 1;
        JointTable coarse = coarsen_axis(j, "B", to_bin, {"lo", "hi"});
        coarse.validate();
        double merged = mutual_information(coarse, "A", "B");
        CHECK(merged <= fine + 1e-12);
    }
}

TEST_CASE("quantize_axis bins numeric labels") {
    JointTable j = JointTable::zeros(
        {"A", "V"}, {{"a0", "a1"}, {"0.1", "0.4", "0.6", "0.9"}});
    j.cells = {0.1, 0.2, 0.3, 0.0, 0.0, 0.1, 0.1, 0.2};
    j.validate();
    Quantizer q{0.5, 0.0, 2, ClampPolicy::clamp_to_edge};
    JointTable binned = quantize_axis(j, "V", q);
    CHECK(binned.axis_alphabets[1] ==
          std::vector<std::string>{"bin0", "bin1"});
    CHECK(binned.at({0, 0}) == Catch::Approx(0.3));
    CHECK(binned.at({0, 1}) == Catch::Approx(0.3));
    CHECK(binned.at({1, 1}) == Catch::Approx(0.3));

    JointTable text = JointTable::zeros({"A", "V"}, {{"a"}, {"left", "right"}});
    text.cells = {0.5, 0.5};
    CHECK_THROWS_AS(quantize_axis(text, "V", q), validation_error);
}
