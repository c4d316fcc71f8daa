#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "xda/dataset.hpp"
#include "xda/error.hpp"
#include "xda/synth.hpp"

using namespace xda;

namespace {

Dataset patients() {
    return parse_csv(
        "Location,Smoking,Age,Cost\n"
        "A,Yes,40,10\n"
        "A,No,35,4\n"
        "B,Yes,50,7\n"
        "B,No,28,2\n"
        "C,Yes,61,9\n"
        "A,Yes,45,8\n");
}

}  // namespace

TEST_CASE("csv loading infers kinds and drops incomplete rows") {
    SUBCASE("all-string columns become dimensions") {
        Dataset d = parse_csv("City,State,Country\nLyon,ARA,FR\nNice,PACA,FR\nBonn,NRW,DE\n");
        CHECK(d.row_count() == 3);
        CHECK(d.column_count() == 3);
        for (const auto& c : d.columns()) CHECK(c.is_dimension());
    }
    SUBCASE("integer column becomes a measure") {
        Dataset d = parse_csv("k,n\na,1\nb,2\nc,30\n");
        CHECK(d.column("n").is_measure());
        CHECK(d.column("k").is_dimension());
    }
    SUBCASE("a row with an empty cell is dropped") {
        Dataset d = parse_csv("k,n\na,1\nb,\nc,3\n");
        CHECK(d.row_count() == 2);
    }
    SUBCASE("hints override inference") {
        CsvOptions o;
        o.kind_hints["n"] = ColumnKind::Dimension;
        Dataset d = parse_csv("k,n\na,1\nb,2\n", o);
        CHECK(d.column("n").is_dimension());
        CHECK(d.column("n").categories() == std::vector<std::string>{"1", "2"});
    }
    SUBCASE("quoted fields and a byte-order mark") {
        Dataset d = parse_csv("\xEF\xBB\xBFname,v\n\"Smith, J\",1\n\"say \"\"hi\"\"\",2\n");
        CHECK(d.column("name").code_of("Smith, J").has_value());
        CHECK(d.column("name").code_of("say \"hi\"").has_value());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(parse_csv(""), DataError);
        CHECK_THROWS_AS(parse_csv("a,a\n1,2\n"), DataError);
        CHECK_THROWS_AS(parse_csv("a,b\n"), DataError);
        CHECK_THROWS_AS(parse_csv("a,b\n1,\n"), DataError);
        CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), DataError);
        CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
    }
}

TEST_CASE("csv round trip preserves values") {
    Dataset d = patients();
    Dataset back = parse_csv(to_csv(d));
    REQUIRE(back.row_count() == d.row_count());
    for (std::size_t c = 0; c < d.column_count(); ++c)
        for (std::size_t r = 0; r < d.row_count(); ++r)
            CHECK(back.column(c).value_string(r) == d.column(c).value_string(r));
}

TEST_CASE("schema json") {
    auto j = patients().schema_json();
    CHECK(j["rows"] == 6);
    CHECK(j["columns"][0]["name"] == "Location");
    CHECK(j["columns"][0]["kind"] == "dimension");
    CHECK(j["columns"][3]["kind"] == "measure");
}

TEST_CASE("selection") {
    Dataset d = patients();
    SUBCASE("filter on one value") {
        Dataset a = select(d, Filter{"Location", "A"});
        CHECK(a.row_count() == 3);
        for (std::size_t r = 0; r < a.row_count(); ++r) CHECK(a.column("Location").value_string(r) == "A");
    }
    SUBCASE("full-domain predicate returns everything") {
        CHECK(select(d, Predicate{"Location", {"A", "B", "C"}}).row_count() == d.row_count());
    }
    SUBCASE("value outside the domain gives an empty subset") {
        CHECK(select(d, Filter{"Location", "Z"}).row_count() == 0);
    }
    SUBCASE("unknown dimension throws") {
        CHECK_THROWS_AS(select(d, Filter{"Nope", "A"}), UnknownColumnError);
    }
    SUBCASE("subspace and complement partition the rows") {
        Subspace s({{"Location", "A"}, {"Smoking", "Yes"}});
        CHECK(select(d, s).row_count() == 2);
        CHECK(select(d, s).row_count() + select_complement(d, s).row_count() == d.row_count());
    }
    SUBCASE("two filters on one dimension are rejected") {
        CHECK_THROWS_AS(Subspace({{"Location", "A"}, {"Location", "B"}}), DataError);
    }
}

TEST_CASE("aggregates") {
    Dataset d = patients();
    CHECK(aggregate(d, "Cost", Aggregate::Sum) == doctest::Approx(40));
    CHECK(aggregate(d, "Cost", Aggregate::Count) == doctest::Approx(6));
    CHECK(aggregate(d, "Cost", Aggregate::Avg) == doctest::Approx(40.0 / 6));
    CHECK(aggregate(parse_csv("v\n1\n2\n3\n"), "v", Aggregate::Sum) == doctest::Approx(6));
    CHECK(aggregate(parse_csv("v\n7\n7\n7\n7\n"), "v", Aggregate::Avg) == doctest::Approx(7));
    CHECK_THROWS_AS(aggregate(select(d, Filter{"Location", "Z"}), "Cost", Aggregate::Avg), EmptyAggregateError);
    CHECK(aggregate(select(d, Filter{"Location", "Z"}), "Cost", Aggregate::Sum) == 0);
    CHECK_THROWS_AS(aggregate(d, "Location", Aggregate::Sum), DataError);
    CHECK(parse_aggregate("avg") == Aggregate::Avg);
    CHECK(parse_aggregate("SUM") == Aggregate::Sum);
    CHECK_THROWS_AS(parse_aggregate("median"), DataError);
}

TEST_CASE("discretization") {
    SUBCASE("1..100 into two bins splits at the median") {
        std::vector<double> v(100);
        std::iota(v.begin(), v.end(), 1.0);
        Dataset d({Column::measure("x", v)});
        Dataset b = discretize(d, "x", 2);
        const Column& c = b.column("x_bin");
        REQUIRE(c.cardinality() == 2);
        CHECK(c.bins()[0].lo == 1);
        CHECK(c.bins()[0].hi == 50);
        CHECK(c.bins()[1].lo == 51);
        CHECK(c.bins()[1].hi == 100);
    }
    SUBCASE("constant column collapses to one bin") {
        Dataset d({Column::measure("x", std::vector<double>(20, 3.0))});
        CHECK(discretize(d, "x", 5).column("x_bin").cardinality() == 1);
    }
    SUBCASE("fewer distinct values than bins") {
        Dataset d({Column::measure("x", {1, 1, 2, 2, 2, 3})});
        CHECK(discretize(d, "x", 10).column("x_bin").cardinality() <= 3);
    }
    SUBCASE("bins < 2 is rejected") {
        Dataset d({Column::measure("x", {1, 2})});
        CHECK_THROWS_AS(discretize(d, "x", 1), DataError);
    }
    SUBCASE("measures replaced in place") {
        Dataset d = discretize_measures(patients(), 3);
        CHECK(d.column("Cost").is_dimension());
        CHECK(d.column("Cost").is_binned());
        CHECK(d.column_index("Cost") == 3);
    }
}

TEST_CASE("property: equal-frequency bins differ by at most one row on distinct values") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> nd(10, 400), bd(2, 12);
        const int n = nd(rng), bins = bd(rng);
        std::vector<double> v(n);
        std::normal_distribution<double> g(0, 5);
        for (auto& x : v) x = g(rng);
        const Column c = discretize_column(Column::measure("x", v), static_cast<std::size_t>(bins), "b");
        std::vector<int> counts(c.cardinality(), 0);
        for (auto code : c.codes()) ++counts[code];
        CHECK(static_cast<int>(c.cardinality()) == std::min(bins, n));
        CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);
        // Bin ranges are ordered and every value lies inside its bin.
        for (std::size_t r = 0; r < v.size(); ++r) {
            CHECK(v[r] >= c.bins()[c.codes()[r]].lo);
            CHECK(v[r] <= c.bins()[c.codes()[r]].hi);
        }
        for (std::size_t b = 1; b < c.cardinality(); ++b) CHECK(c.bins()[b - 1].hi < c.bins()[b].lo);
    }
}

TEST_CASE("SYN-B measure into ten bins holds N/10 plus or minus one rows") {
    SynBInstance inst = gen_syn_b(SynBConfig{}, 11);
    const Column c = discretize_column(inst.data.column("Z"), 10, "Zb");
    std::vector<std::size_t> counts(c.cardinality(), 0);
    for (auto code : c.codes()) ++counts[code];
    REQUIRE(counts.size() == 10);
    for (auto n : counts) CHECK(std::abs(static_cast<long>(n) - 1000) <= 1);
}

TEST_CASE("property: selection algebra on random data") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::uint32_t> a(0, 3), b(0, 2);
        std::normal_distribution<double> g(10, 3);
        const std::size_t n = 200;
        std::vector<std::uint32_t> ca(n), cb(n);
        std::vector<double> m(n);
        for (std::size_t r = 0; r < n; ++r) ca[r] = a(rng), cb[r] = b(rng), m[r] = g(rng);
        Dataset d({Column::dimension("A", {"a0", "a1", "a2", "a3"}, ca), Column::dimension("B", {"b0", "b1", "b2"}, cb),
                   Column::measure("M", m)});
        Predicate p{"A", {"a0", "a2"}};
        Predicate q{"A", {"a1"}};
        Subspace s(std::vector<Filter>{{"B", "b1"}});
        // Idempotence and partition.
        CHECK(select(select(d, s), s).row_count() == select(d, s).row_count());
        CHECK(select(d, p).row_count() + select_complement(d, p).row_count() == n);
        // Sum additivity over disjoint predicates of one attribute.
        Predicate pq{"A", {"a0", "a2", "a1"}};
        CHECK(aggregate(select(d, pq), "M", Aggregate::Sum) ==
              doctest::Approx(aggregate(select(d, p), "M", Aggregate::Sum) + aggregate(select(d, q), "M", Aggregate::Sum)));
    }
}

TEST_CASE("csv file io") {
    const auto path = std::filesystem::temp_directory_path() / "xda_dataset_io.csv";
    write_csv(patients(), path.string());
    Dataset d = load_csv(path.string());
    CHECK(d.row_count() == 6);
    std::filesystem::remove(path);
}
