#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheeger/adjusted_tuples.h"
#include "cheeger/cheeger_solver.h"
#include "test_util.h"

using namespace cheeger;

namespace {

// Cells carrying `label` in a picture where any non-'.' character is inside.
CellSet labeled(const GridDomain& dom, const std::vector<std::string>& rows, char label) {
  std::vector<int> cells;
  const int h = static_cast<int>(rows.size());
  for (int r = 0; r < h; ++r)
    for (int x = 0; x < static_cast<int>(rows[static_cast<std::size_t>(r)].size()); ++x)
      if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] == label)
        cells.push_back(dom.index(x, h - 1 - r));
  return measure(dom, std::move(cells));
}

GridDomain picture(const std::vector<std::string>& rows) {
  std::vector<std::string> mask = rows;
  for (auto& r : mask)
    for (auto& c : r)
      if (c != '.') c = '#';
  return domain_from_rows(mask);
}

// The max ratio never goes up along the recorded replacements.
void check_history(const KTupleState& start, const KTupleState& end, double tol) {
  double prev = start.max_ratio();
  for (const auto& step : end.history) {
    CHECK(step.objective <= prev * (1.0 + tol));
    prev = step.objective;
  }
  CHECK(end.value <= start.max_ratio() * (1.0 + tol));
}

// E_1 = cheeger(region), E_2 = cheeger(region \ E_1), ...
KTupleState greedy(const GridDomain& dom, int k) {
  std::vector<CellSet> parts;
  Membership free = dom.mask();
  for (int i = 0; i < k; ++i) {
    const auto res = cheeger::cheeger(dom, free);
    for (int c : res.set.cells) free[static_cast<std::size_t>(c)] = 0;
    parts.push_back(res.set);
  }
  return make_state(std::move(parts));
}

const std::vector<std::string> kDumbbell = {
    "aaaa.bbbb",
    "aaaa#bbbb",
    "aaaa.bbbb",
    "aaaa.bbbb",
};

}  // namespace

TEST_CASE("a Cheeger set alone is 1-adjusted with zero margin") {
  const GridDomain dom = rasterize(shapes::HalfRing{0.3}, 32);
  const auto res = cheeger::cheeger(dom, dom.mask());
  const KTupleState s = make_state({res.set});
  const auto report = verify_adjustment(dom, s, 1, {});
  CHECK(report.pass);
  CHECK(report.level == 1);
  CHECK(report.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.exact);
}

TEST_CASE("dumbbell blocks pass and a shrunken block fails") {
  const GridDomain dom = picture(kDumbbell);
  const CellSet a = labeled(dom, kDumbbell, 'a');
  const CellSet b = labeled(dom, kDumbbell, 'b');
  CHECK(a.ratio() == doctest::Approx(1.0));

  const auto ok = verify_adjustment(dom, make_state({a, b}), 1, {});
  CHECK(ok.pass);
  CHECK(ok.worst_margin >= -1e-12);
  REQUIRE(ok.checks.size() == 2);
  for (const auto& c : ok.checks) CHECK(c.residual_value == doctest::Approx(1.0));

  // Drop one corner of block a: 16/15 > 1 while a itself is still available.
  std::vector<int> cells = a.cells;
  cells.erase(cells.begin());
  const CellSet shrunk = measure(dom, cells);
  const auto bad = verify_adjustment(dom, make_state({shrunk, b}), 1, {});
  CHECK_FALSE(bad.pass);
  CHECK(bad.level == 0);
  CHECK(bad.worst_margin == doctest::Approx(1.0 / (16.0 / 15.0) - 1.0));

  // The heuristic recovers the two blocks.
  const KTupleState h = hk_heuristic(dom, dom.mask(), 2, Objective::max, {});
  CHECK(h.value == doctest::Approx(1.0));
  CHECK(verify_adjustment(dom, h, 1, {}).pass);
}

TEST_CASE("adjust_1 repairs the shrunken block") {
  const GridDomain dom = picture(kDumbbell);
  std::vector<int> cells = labeled(dom, kDumbbell, 'a').cells;
  cells.erase(cells.begin());
  const KTupleState start = make_state({measure(dom, cells), labeled(dom, kDumbbell, 'b')});
  const KTupleState out = adjust_1(dom, start, {});
  CHECK(out.value == doctest::Approx(1.0));
  CHECK_FALSE(out.history.empty());
  CHECK(out.history.front().reason == "max_part");
  CHECK(out.adjustment_level == 1);
  check_history(start, out, 1e-6);
  CHECK(verify_adjustment(dom, out, 1, {}).pass);
}

TEST_CASE("adjust_1 leaves an adjusted tuple unchanged") {
  const GridDomain dom = picture(kDumbbell);
  const KTupleState start = make_state({labeled(dom, kDumbbell, 'a'), labeled(dom, kDumbbell, 'b')});
  const KTupleState out = adjust_1(dom, start, {});
  CHECK(out.history.empty());
  CHECK(out.parts == start.parts);
  // Idempotent on its own output.
  const GridDomain ring = rasterize(shapes::Annulus{0.5}, 24);
  const KTupleState once = adjust_1(ring, greedy(ring, 2), {});
  const KTupleState twice = adjust_1(ring, once, {});
  CHECK(twice.history.size() == once.history.size());
  CHECK(twice.parts == once.parts);
}

TEST_CASE("strip with end-cell seeds") {
  const GridDomain dom = domain_from_rows({"####"});
  const KTupleState start = make_state({measure(dom, std::vector<int>{0}), measure(dom, std::vector<int>{3})});
  const double optimum = hk_bruteforce(dom, dom.mask(), 2).value;
  CHECK(optimum == doctest::Approx(3.0));

  // Level 1 grows the first seed into the three free cells, which pins the
  // second seed: (8/3, 4) is 1-adjusted but not a Cheeger couple.
  const KTupleState one = adjust_1(dom, start, {});
  CHECK(one.value == doctest::Approx(4.0));
  CHECK(verify_adjustment(dom, one, 1, {}).pass);
  CHECK_FALSE(verify_adjustment(dom, one, 2, {}).pass);

  // The pair test at level 2 replaces the couple by the two dominoes.
  const KTupleState two = adjust_n(dom, start, 2, {});
  CHECK(two.value == doctest::Approx(optimum));
  CHECK(two.parts[0].size() == 2);
  CHECK(two.parts[1].size() == 2);
  CHECK(two.adjustment_level == 2);
  CHECK(two.exact);
  CHECK(two.history.back().reason == "subtuple");
  check_history(start, two, 1e-6);
}

TEST_CASE("three islands force the partition") {
  SUBCASE("3x3 blocks, automatic oracles") {
    const std::vector<std::string> rows = {"aaa.bbb.ccc", "aaa.bbb.ccc", "aaa.bbb.ccc"};
    const GridDomain dom = picture(rows);
    const CellSet a = labeled(dom, rows, 'a');
    const CellSet b = labeled(dom, rows, 'b');
    const CellSet c = labeled(dom, rows, 'c');
    const KTupleState start = make_state({measure(dom, std::vector<int>{a.cells[4]}),
                                          measure(dom, std::vector<int>{b.cells[4]}),
                                          measure(dom, std::vector<int>{c.cells[4]})});
    AdjustOptions opt;
    opt.mode = OracleMode::automatic;
    const KTupleState out = adjust_n(dom, start, 3, opt);
    CHECK(out.value == doctest::Approx(a.ratio()));
    CHECK(out.parts[0] == a);
    CHECK(out.parts[1] == b);
    CHECK(out.parts[2] == c);
    for (int n = 1; n <= 3; ++n) CHECK(verify_adjustment(dom, out, n, opt).pass);
    CHECK_FALSE(verify_adjustment(dom, out, 2, opt).exact);
  }
  SUBCASE("2x2 blocks, exact oracles") {
    const std::vector<std::string> rows = {"aa.bb.cc", "aa.bb.cc"};
    const GridDomain dom = picture(rows);
    const KTupleState start = make_state({measure(dom, std::vector<int>{labeled(dom, rows, 'a').cells[0]}),
                                          measure(dom, std::vector<int>{labeled(dom, rows, 'b').cells[0]}),
                                          measure(dom, std::vector<int>{labeled(dom, rows, 'c').cells[0]})});
    const KTupleState out = adjust_n(dom, start, 3, {});
    CHECK(out.value == doctest::Approx(2.0));
    CHECK(out.exact);
    const auto report = verify_adjustment(dom, out, 3, {});
    CHECK(report.pass);
    CHECK(report.exact);
    CHECK(report.checks.size() == 7);
  }
}

TEST_CASE("L-shaped mask, k=3, level 2 in exact mode") {
  const std::vector<std::string> rows = {"a#..", "##..", "##b#", "###c"};
  const GridDomain dom = picture(rows);
  REQUIRE(dom.cell_count() == 12);
  const KTupleState start =
      make_state({labeled(dom, rows, 'a'), labeled(dom, rows, 'b'), labeled(dom, rows, 'c')});
  const KTupleState out = adjust_n(dom, start, 2, {});
  const KTupleState best = hk_bruteforce(dom, dom.mask(), 3);
  CHECK(out.value == doctest::Approx(best.value).epsilon(1e-6));
  const auto report = verify_adjustment(dom, out, 2, {});
  CHECK(report.pass);
  CHECK(report.exact);
  CHECK(report.checks.size() == 6);
  check_history(start, out, 1e-6);
  // Passing level 2 implies passing level 1.
  CHECK(verify_adjustment(dom, out, 1, {}).pass);
}

TEST_CASE("level 2 on random small masks") {
  std::mt19937 rng(31);
  int done = 0;
  while (done < 20) {
    const GridDomain dom = domain_from_rows(testutil::random_rows(rng, 4, 3, 0.8, 12));
    const int k = 2 + done % 2;
    if (dom.cell_count() < k) continue;
    ++done;
    // Seed with the first k cells as singletons.
    std::vector<CellSet> seeds;
    for (int i = 0; i < k; ++i) seeds.push_back(measure(dom, std::vector<int>{dom.cells()[static_cast<std::size_t>(i)]}));
    const KTupleState start = make_state(std::move(seeds));
    const KTupleState out = adjust_n(dom, start, 2, {});
    check_history(start, out, 1e-6);
    const auto report = verify_adjustment(dom, out, 2, {});
    CHECK(report.pass);
    CHECK(report.exact);
    if (k == 2) CHECK(out.value == doctest::Approx(hk_bruteforce(dom, dom.mask(), 2).value).epsilon(1e-6));
  }
}

TEST_CASE("adjust_1 from random seeds on an annulus") {
  const GridDomain dom = rasterize(shapes::Annulus{0.5}, 24);
  const auto cells = dom.cells();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::vector<int> a;
    std::vector<int> b;
    for (int t = 0; t < 30; ++t) {
      const int c = cells[pick(rng)];
      if (t % 2) a.push_back(c);
      else b.push_back(c);
    }
    std::erase_if(b, [&](int c) { return std::find(a.begin(), a.end(), c) != a.end(); });
    const KTupleState start = make_state({measure(dom, a), measure(dom, b)});
    const KTupleState out = adjust_1(dom, start, {});
    check_history(start, out, 1e-6);
    CHECK(verify_adjustment(dom, out, 1, {}).pass);
  }
}

TEST_CASE("oracle modes and argument checks") {
  const GridDomain dom = rasterize(unit_square(), 8);
  const KTupleState s = greedy(dom, 2);
  CHECK_THROWS_AS(verify_adjustment(dom, s, 2, {}), OracleModeError);
  AdjustOptions heur;
  heur.mode = OracleMode::heuristic;
  const auto report = verify_adjustment(dom, s, 2, heur);
  CHECK_FALSE(report.exact);
  CHECK_THROWS_AS(verify_adjustment(dom, s, 3, {}), std::invalid_argument);
  CHECK_THROWS_AS(adjust_n(dom, s, 0, {}), std::invalid_argument);
  KTupleState overlap = s;
  overlap.parts[1] = overlap.parts[0];
  CHECK_THROWS_AS(adjust_1(dom, overlap, {}), std::logic_error);
  CHECK(oracle_mode_from_string(to_string(OracleMode::automatic)) == OracleMode::automatic);
  CHECK_THROWS_AS(oracle_mode_from_string("fast"), std::invalid_argument);
}
