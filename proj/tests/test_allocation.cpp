#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "moldsched/allocation.hpp"
#include "moldsched/verify.hpp"

using namespace moldsched;

namespace {

// Independent route for the initial allocation: plain scan over the
// feasible processor counts.
int scan_initial(const SpeedupSpec& spec, int P, const AllocationParams& ps) {
  const ExtremalStats st = extremal_stats(spec, P);
  if (st.a_min <= 0) return 1;
  if (spec.kind == Model::Tabulated) {
    int best = -1;
    for (int p = 1; p <= P; ++p) {
      if (area(spec, p, P) / st.a_min > ps.alpha + 1e-12) continue;
      if (best < 0 || exec_time(spec, p, P) < exec_time(spec, best, P)) {
        best = p;
      }
    }
    return best < 0 ? 1 : best;
  }
  int best = 1;
  for (int p = 1; p <= st.p_max; ++p) {
    if (area(spec, p, P) / st.a_min <= ps.alpha + 1e-12) best = p;
  }
  return best;
}

}  // namespace

TEST_CASE("parameter rows satisfy their defining relations") {
  const ParamsCheck check = verify_params();
  CHECK(check.pass);
  for (const auto& row : check.rows) {
    CHECK(params_relation_error(row.params) <= 1e-12);
    CHECK(params_side_condition(row.params));
  }
  // headline values
  CHECK(params_for(Model::Roofline).mu == doctest::Approx(0.382).epsilon(1e-2));
  CHECK(1.0 / params_for(Model::Roofline).mu ==
        doctest::Approx(2.62).epsilon(1e-2));
  CHECK(params_for(Model::Communication).alpha == doctest::Approx(4.0 / 3.0));
  CHECK(params_for(Model::Communication).beta == doctest::Approx(1.5));
  CHECK(params_for(Model::Communication).mu ==
        doctest::Approx(0.295).epsilon(1e-2));
  CHECK(params_for(Model::Amdahl).alpha ==
        doctest::Approx(1.883).epsilon(1e-3));
  CHECK(params_for(Model::Amdahl).beta ==
        doctest::Approx(2.132).epsilon(1e-3));
  CHECK(params_for(Model::Amdahl).mu == doctest::Approx(0.22).epsilon(1e-2));
  CHECK(params_for(Model::General).alpha == doctest::Approx(2.0));
  CHECK(params_for(Model::General).beta == doctest::Approx(27.0 / 13.0));
  // tabulated shares the general row
  CHECK(params_for(Model::Tabulated).alpha == params_for(Model::General).alpha);
}

TEST_CASE("ratio_from solves the capping-fraction equation") {
  SUBCASE("(1, 1)") {
    const RatioResult r = ratio_from(1, 1);
    CHECK(r.mu == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(2.0 / (3.0 - std::sqrt(5.0))));
    CHECK(r.ratio < 2.62);
    CHECK(r.constraint_ok);
  }
  SUBCASE("(4/3, 3/2)") {
    const RatioResult r = ratio_from(4.0 / 3.0, 1.5);
    CHECK(r.mu ==
          doctest::Approx((23.0 - std::sqrt(313.0)) / 18.0).epsilon(1e-12));
    CHECK(r.ratio < 3.391);
    CHECK(r.ratio > 3.390);
  }
  SUBCASE("(2, 27/13)") {
    const RatioResult r = ratio_from(2.0, 27.0 / 13.0);
    CHECK(r.mu ==
          doctest::Approx((33.0 - std::sqrt(738.0)) / 27.0).epsilon(1e-12));
    CHECK(r.ratio < 4.63);
    CHECK(r.ratio > 4.62);
  }
  SUBCASE("non-finite input is a domain error") {
    CHECK_THROWS_AS(ratio_from(std::nan(""), 1.0), std::domain_error);
    CHECK_THROWS_AS(ratio_from(1.0, 0.0), std::domain_error);
  }
}

TEST_CASE("initial allocation picks the time-minimal feasible count") {
  SUBCASE("communication w=6, c=1, P=8") {
    const auto spec = SpeedupSpec::communication(6, 1);
    const auto ps = params_for(Model::Communication);
    CHECK(initial_allocation(spec, 8, ps) == scan_initial(spec, 8, ps));
    CHECK(initial_allocation(spec, 8, ps) == 2);  // a(2)/a_min = 4/3 exactly
  }
  SUBCASE("amdahl w=1, d=1, P=4") {
    const auto spec = SpeedupSpec::amdahl(1, 1);
    const auto ps = params_for(Model::Amdahl);
    CHECK(initial_allocation(spec, 4, ps) == scan_initial(spec, 4, ps));
    CHECK(initial_allocation(spec, 4, ps) == 2);  // a(3)/a_min = 2 > alpha
  }
  SUBCASE("roofline: area is flat up to pbar, so p_max is free") {
    const auto ps = params_for(Model::Roofline);
    for (double w : {0.1, 1.0, 7.0, 1000.0}) {
      const auto spec = SpeedupSpec::roofline(w, 4);
      CHECK(initial_allocation(spec, 8, ps) == 4);
    }
  }
  SUBCASE("tabulated uses an exhaustive scan over the whole range") {
    // time dips at p=2 and again at p=5, but p=5's area ratio is too big
    const auto spec = SpeedupSpec::tabulated({4.0, 1.5, 5.0, 5.0, 1.4});
    const auto ps = params_for(Model::Tabulated);  // alpha = 2
    // a_min = min(4, 3, 15, 20, 7) = 3; feasible: a(p)/3 <= 2 -> p in {1, 2}
    CHECK(initial_allocation(spec, 5, ps) == 2);
    CHECK(initial_allocation(spec, 5, ps) == scan_initial(spec, 5, ps));
  }
}

TEST_CASE("allocation adjustment caps at ceil(mu P)") {
  const double mu_roo = params_for(Model::Roofline).mu;
  CHECK(adjust_allocation(7, 10, mu_roo) == 4);  // ceil(3.82) = 4
  CHECK(adjust_allocation(3, 10, mu_roo) == 3);
  CHECK(adjust_allocation(1, 1, 0.3) == 1);
  CHECK_THROWS_AS(adjust_allocation(0, 4, 0.3), std::domain_error);
  CHECK_THROWS_AS(adjust_allocation(5, 4, 0.3), std::domain_error);
}

TEST_CASE("allocate composes both steps and reports time and area") {
  SUBCASE("roofline capped by the adjustment") {
    const auto a = allocate(SpeedupSpec::roofline(10, 8), 10,
                            params_for(Model::Roofline), 42);
    CHECK(a.task_id == 42);
    CHECK(a.procs == 4);
    CHECK(a.exec == doctest::Approx(2.5));
    CHECK(a.area == doctest::Approx(10.0));
  }
  SUBCASE("amdahl on a small platform") {
    const auto a =
        allocate(SpeedupSpec::amdahl(1, 1), 4, params_for(Model::Amdahl));
    CHECK(a.procs == 1);  // initial 2, cap ceil(0.22*4) = 1
  }
  SUBCASE("communication stays below a large cap") {
    const auto a = allocate(SpeedupSpec::communication(6, 1), 100,
                            params_for(Model::Communication));
    CHECK(a.procs == 2);
  }
}

TEST_CASE("allocation bound grids: alpha, beta, cap, and scan equality") {
  for (Model kind : {Model::Roofline, Model::Communication, Model::Amdahl,
                     Model::General}) {
    for (int P : {4, 64, 512}) {
      const GridCheck check = verify_alloc_bounds(kind, P, 400, 7);
      CAPTURE(model_name(kind));
      CAPTURE(P);
      CHECK(check.violations.empty());
      const AllocationParams ps = params_for(kind);
      CHECK(check.worst_area_ratio <= ps.alpha + 1e-9);
      CHECK(check.worst_time_ratio <= ps.beta + 1e-9);
    }
  }
}

TEST_CASE("degenerate zero-work specs fall back to one processor") {
  const auto ps = params_for(Model::General);
  CHECK(initial_allocation(SpeedupSpec::general(0, 0, 0), 8, ps) == 1);
  const auto a = allocate(SpeedupSpec::general(0, 0, 0), 8, ps);
  CHECK(a.procs == 1);
  CHECK(a.exec == 0.0);
}
