#include <doctest.h>

#include <cmath>
#include <cstring>

#include "dbf/data.hpp"
#include "dbf/errors.hpp"
#include "dbf/pca.hpp"
#include "dbf/rng.hpp"

using namespace dbf;

namespace {

// Characteristic-polynomial oracle for 2x2 symmetric [[a,b],[b,d]].
std::pair<double, double> eigen2x2(double a, double b, double d) {
    const double mean = 0.5 * (a + d);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    return {mean + disc, mean - disc};
}

SymMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
    SymMatrix m(static_cast<int>(rows.size()));
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) m.at(i, j++) = v;
        ++i;
    }
    return m;
}

SymMatrix random_symmetric(Rng& rng, int p) {
    SymMatrix m(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            const double v = rng.uniform(-1.0, 1.0);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    return m;
}

double reconstruction_error(const SymMatrix& m, const EigenDecomposition& eig) {
    const int p = m.dim;
    double frob = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            double r = 0.0;
            for (int k = 0; k < p; ++k)
                r += eig.vectors[i][k] * eig.values[k] * eig.vectors[j][k];
            const double d = r - m.at(i, j);
            frob += d * d;
        }
    return std::sqrt(frob);
}

double orthonormality_error(const EigenDecomposition& eig) {
    const int p = static_cast<int>(eig.values.size());
    double worst = 0.0;
    for (int k = 0; k < p; ++k)
        for (int l = 0; l < p; ++l) {
            double dot = 0.0;
            for (int j = 0; j < p; ++j) dot += eig.vectors[j][k] * eig.vectors[j][l];
            worst = std::max(worst, std::abs(dot - (k == l ? 1.0 : 0.0)));
        }
    return worst;
}

StandardizedMatrix random_standardized(Rng& rng, int n, int p) {
    std::vector<std::vector<double>> values(n, std::vector<double>(p));
    for (auto& row : values)
        for (auto& v : row) v = rng.uniform(-10.0, 10.0);
    std::vector<std::string> names;
    for (int j = 0; j < p; ++j) names.push_back("c" + std::to_string(j));
    return standardize_columns(values, names);
}

} // namespace

TEST_CASE("correlation of identical and negated columns") {
    StandardizedMatrix z;
    z.columnNames = {"a", "b", "c"};
    z.z = {{-1.0, -1.0, 1.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, -1.0}};
    z.means = {0, 0, 0};
    z.stdDevs = {1, 1, 1};
    const auto r = correlation_matrix(z);
    CHECK(r.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.at(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.at(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlation of independent columns stays near zero (n = 10000)") {
    Rng rng(31);
    const int n = 10000;
    std::vector<std::vector<double>> values(n, std::vector<double>(2));
    for (auto& row : values) {
        row[0] = rng.gauss();
        row[1] = rng.gauss();
    }
    const auto z = standardize_columns(values, {"a", "b"});
    const auto r = correlation_matrix(z);
    CHECK(std::abs(r.at(0, 1)) < 0.05);
}

TEST_CASE("eigen_decompose matches the 2x2 characteristic-polynomial oracle") {
    const auto [hi, lo] = eigen2x2(2.0, 1.0, 2.0);
    CHECK(hi == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-15));

    const auto eig = eigen_decompose(sym({{2.0, 1.0}, {1.0, 2.0}}));
    CHECK(std::abs(eig.values[0] - 3.0) < 1e-12);
    CHECK(std::abs(eig.values[1] - 1.0) < 1e-12);
    // oriented eigenvectors: (1,1)/sqrt2 and (1,-1)/sqrt2
    CHECK(eig.vectors[0][0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(eig.vectors[1][0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(eig.vectors[0][1] == doctest::Approx(std::sqrt(0.5)));
    CHECK(eig.vectors[1][1] == doctest::Approx(-std::sqrt(0.5)));

    Rng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform(-5.0, 5.0);
        const double b = rng.uniform(-5.0, 5.0);
        const double d = rng.uniform(-5.0, 5.0);
        const auto expected = eigen2x2(a, b, d);
        const auto got = eigen_decompose(sym({{a, b}, {b, d}}));
        CHECK(std::abs(got.values[0] - expected.first) < 1e-9);
        CHECK(std::abs(got.values[1] - expected.second) < 1e-9);
    }
}

TEST_CASE("eigen_decompose on identity and diagonal matrices") {
    const auto id = eigen_decompose(sym({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    for (double v : id.values) CHECK(v == doctest::Approx(1.0));

    const auto diag = eigen_decompose(sym({{5, 0, 0}, {0, 2, 0}, {0, 0, 1}}));
    CHECK(diag.values[0] == doctest::Approx(5.0));
    CHECK(diag.values[1] == doctest::Approx(2.0));
    CHECK(diag.values[2] == doctest::Approx(1.0));
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
            CHECK(diag.vectors[j][k] == doctest::Approx(j == k ? 1.0 : 0.0));
}

TEST_CASE("eigen_decompose rejects non-finite input") {
    SymMatrix m(2);
    m.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)eigen_decompose(m), Error);
}

TEST_CASE("reconstruction and orthonormality over random symmetric matrices") {
    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 2 + static_cast<int>(rng.next_u64() % 9);
        const auto m = random_symmetric(rng, p);
        const auto eig = eigen_decompose(m);
        CHECK(reconstruction_error(m, eig) < 1e-9);
        CHECK(orthonormality_error(eig) < 1e-9);
        for (std::size_t k = 1; k < eig.values.size(); ++k)
            CHECK(eig.values[k - 1] >= eig.values[k]);
        double trace = 0.0;
        for (int i = 0; i < p; ++i) trace += m.at(i, i);
        double sum = 0.0;
        for (double v : eig.values) sum += v;
        CHECK(std::abs(trace - sum) < 1e-9);
    }
}

TEST_CASE("orient_sign") {
    std::vector<double> v{-0.8, 0.6};
    orient_sign(v);
    CHECK(v[0] == doctest::Approx(0.8));
    CHECK(v[1] == doctest::Approx(-0.6));

    std::vector<double> w{0.6, 0.8};
    orient_sign(w);
    CHECK(w[0] == doctest::Approx(0.6));
    CHECK(w[1] == doctest::Approx(0.8));

    std::vector<double> tie{-0.5, 0.5};
    orient_sign(tie);
    CHECK(tie[0] == doctest::Approx(0.5));
    CHECK(tie[1] == doctest::Approx(-0.5));

    std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(orient_sign(zero), Error);
}

TEST_CASE("explained_variance reproduces the published group tables") {
    {
        const auto [f, c] = explained_variance({4.439, 1.266}, 7);
        CHECK(std::abs(f[0] * 100 - 63.4) < 0.05);
        CHECK(std::abs(f[1] * 100 - 18.1) < 0.05);
        CHECK(std::abs(c[1] * 100 - 81.5) < 0.1);
    }
    {
        const auto [f, c] = explained_variance({9.625}, 10);
        CHECK(std::abs(f[0] * 100 - 96.2) <= 0.05);
    }
    {
        const auto [f, c] = explained_variance({3.0, 1.0}, 4);
        CHECK(f[0] == doctest::Approx(0.75));
        CHECK(f[1] == doctest::Approx(0.25));
        CHECK(c[1] == doctest::Approx(1.0));
    }
}

TEST_CASE("retain_components") {
    CHECK(retain_components({4.439, 1.266, 0.6, 0.3, 0.2, 0.1, 0.095},
                            RetentionRule::kaiser()) == 2);
    CHECK(retain_components({9.625, 0.2, 0.05, 0.05, 0.025, 0.025, 0.02, 0.02, 0.005, 0.005},
                            RetentionRule::kaiser()) == 1);
    CHECK(retain_components({1.0, 1.0, 1.0}, RetentionRule::kaiser()) == 1); // strict >1, floored
    // cumvar works over a full eigenvalue list (fractions are lambda / p)
    CHECK(retain_components({3.0, 0.6, 0.25, 0.15}, RetentionRule::cumvar(0.75)) == 1);
    CHECK(retain_components({3.0, 0.6, 0.25, 0.15}, RetentionRule::cumvar(0.8)) == 2);
    CHECK(retain_components({3.0, 0.6, 0.25, 0.15}, RetentionRule::cumvar(1.0)) == 4);
    CHECK(retain_components({3.0, 1.0}, RetentionRule::fixed(5)) == 2);
    CHECK(retain_components({3.0, 1.0}, RetentionRule::fixed(0)) == 1);
}

TEST_CASE("component_scores: zero row and hand dot product") {
    PcaModel model;
    model.groupId = GroupId::Communicable;
    model.eigenvalues = {1.5, 0.5};
    model.loadings = {{0.7071, 0.7071}, {0.7071, -0.7071}};
    model.retained = 2;

    StandardizedMatrix z;
    z.columnNames = {"a", "b"};
    z.z = {{0.0, 0.0}, {1.0, 1.0}};
    z.means = {0, 0};
    z.stdDevs = {1, 1};

    const auto scores = component_scores(z, model, {1990, 1991});
    REQUIRE(scores.size() == 2);
    CHECK(scores[0].indexId == "CPC1");
    CHECK(scores[1].indexId == "CPC2");
    CHECK(scores[0].scores[0] == doctest::Approx(0.0));
    CHECK(scores[1].scores[0] == doctest::Approx(0.0));
    CHECK(scores[0].scores[1] == doctest::Approx(1.4142).epsilon(1e-9));

    StandardizedMatrix bad = z;
    bad.columnNames = {"a", "b", "c"};
    bad.z = {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS((void)component_scores(bad, model, {1990, 1991}), Error);
}

TEST_CASE("sample variance of component k equals eigenvalue k") {
    Rng rng(34);
    for (int trial = 0; trial < 10; ++trial) {
        const auto z = random_standardized(rng, 27, 7);
        auto model = fit_pca(z, GroupId::Communicable, RetentionRule::fixed(7));
        REQUIRE(model.retained == 7);
        std::vector<int> years(27);
        for (int i = 0; i < 27; ++i) years[i] = 1990 + i;
        const auto scores = component_scores(z, model, years);
        for (int k = 0; k < 7; ++k) {
            double mean = 0.0;
            for (double s : scores[k].scores) mean += s;
            mean /= 27.0;
            double var = 0.0;
            for (double s : scores[k].scores) var += (s - mean) * (s - mean);
            var /= 26.0;
            CHECK(std::abs(var - model.eigenvalues[k]) < 1e-6);
        }
    }
}

TEST_CASE("fit_pca invariants on standardized data") {
    Rng rng(35);
    const auto z = random_standardized(rng, 27, 6);
    const auto model = fit_pca(z, GroupId::Injury);

    const int p = 6;
    double sum = 0.0;
    for (double v : model.eigenvalues) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(std::abs(sum - p) < 1e-6);

    for (int k = 0; k < p; ++k) {
        double norm = 0.0;
        for (int j = 0; j < p; ++j) norm += model.loadings[j][k] * model.loadings[j][k];
        CHECK(std::abs(norm - 1.0) < 1e-9);
    }
    CHECK(model.cumulativeFraction.back() == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 1; k < model.cumulativeFraction.size(); ++k)
        CHECK(model.cumulativeFraction[k] >= model.cumulativeFraction[k - 1]);
    CHECK(model.retained >= 1);
    CHECK(model.retained <= p);
}

TEST_CASE("two runs produce bitwise-identical loadings") {
    Rng rng(36);
    const auto z = random_standardized(rng, 27, 5);
    const auto m1 = fit_pca(z, GroupId::Communicable);
    const auto m2 = fit_pca(z, GroupId::Communicable);
    for (int j = 0; j < 5; ++j)
        CHECK(std::memcmp(m1.loadings[j].data(), m2.loadings[j].data(), 5 * sizeof(double)) == 0);
    CHECK(std::memcmp(m1.eigenvalues.data(), m2.eigenvalues.data(), 5 * sizeof(double)) == 0);
}

TEST_CASE("scree_data pairs 1-based component numbers with eigenvalues") {
    PcaModel model;
    model.eigenvalues = {5.0, 2.0, 1.0};
    const auto pairs = scree_data(model);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<int, double>{1, 5.0});
    CHECK(pairs[1] == std::pair<int, double>{2, 2.0});
    CHECK(pairs[2] == std::pair<int, double>{3, 1.0});

    PcaModel id3;
    id3.eigenvalues = {1.0, 1.0, 1.0};
    const auto idPairs = scree_data(id3);
    for (int k = 0; k < 3; ++k) {
        CHECK(idPairs[k].first == k + 1);
        CHECK(idPairs[k].second == 1.0);
    }
}

TEST_CASE("component labels follow the group naming scheme") {
    CHECK(component_label(GroupId::Communicable, 0) == "CPC1");
    CHECK(component_label(GroupId::Communicable, 1) == "CPC2");
    CHECK(component_label(GroupId::Noncommunicable, 0) == "NPC");
    CHECK(component_label(GroupId::Noncommunicable, 1) == "NPC2");
    CHECK(component_label(GroupId::Injury, 0) == "IPC1");
    CHECK(component_label(GroupId::Injury, 1) == "IPC2");
}
