#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "csm/telescope.hpp"
#include "gen.hpp"

using namespace csm;

namespace {

std::shared_ptr<const Ring> Z = Ring::integers();

ModulePtr point_module() {
  auto m = std::make_shared<CellularModule>(Z);
  m->add_cell("pt", 0, {});
  return m;
}

ModulePtr two_points() {
  auto m = std::make_shared<CellularModule>(Z);
  m->add_cell("x", 0, {});
  m->add_cell("y", 0, {});
  return m;
}

}  // namespace

TEST_CASE("interval calculus") {
  Interval i1 = interval_from_word("fwd,bwd");
  CHECK(i1.length() == 2);
  Interval pt;  // length 0
  CHECK(concat_interval(i1, pt).fwd == i1.fwd);
  CHECK(reverse_interval(reverse_interval(i1)).fwd == i1.fwd);
  // the four words of length 2
  std::set<std::vector<bool>> all;
  for (bool a : {true, false})
    for (bool b : {true, false}) all.insert(std::vector<bool>{a, b});
  CHECK(all.size() == 4);
  IntervalSSet is = realize_interval(i1);
  CHECK(is.ss->count(0) == 3);
  CHECK(is.ss->count(1) == 2);
  CHECK_FALSE(is.ss->check_identities().has_value());
}

TEST_CASE("long homotopies: concat, reverse, trivial") {
  std::mt19937 rng(60);
  gen::ModuleSpec spec;
  spec.n0 = 2;
  spec.n1 = 1;
  auto a = gen::random_module(Z, spec, rng);
  auto b = gen::random_module(Z, spec, rng);

  Interval I = interval_from_word("fwd,bwd");
  IntervalSSet is = realize_interval(I);
  TensorModule ai = tensor_sset(a, is.ss);
  HomGroup hg = hom_maps(ai.mod, b);
  LongHomotopy h = long_from_carrier(is, ai, random_hom(hg, rng, 1));

  // trivial concat unit
  auto f0 = h.at_label(0);
  LongHomotopy tr = trivial_long(f0, Interval{});
  CHECK(tr.is.iv.length() == 0);

  LongHomotopy h2 = concat_long(reverse_long(h), h);
  CHECK(h2.is.iv.length() == 4);
  CHECK(h2.at_label(0) == h.at_label(2));
  CHECK(h2.at_label(4) == h.at_label(2));

  // strict associativity
  LongHomotopy hr = reverse_long(h);
  LongHomotopy left = concat_long(concat_long(h, hr), h);
  LongHomotopy right = concat_long(h, concat_long(hr, h));
  CHECK(left.carrier == right.carrier);

  // endpoints of the reverse are swapped
  CHECK(hr.at_label(0) == h.at_label(2));
  CHECK(hr.at_label(2) == h.at_label(0));
}

TEST_CASE("concat with inverse is nullhomotopic rel boundary") {
  std::mt19937 rng(61);
  gen::ModuleSpec spec;
  spec.n0 = 2;
  spec.n1 = 0;
  auto a = gen::random_module(Z, spec, rng);
  auto b = gen::random_module(Z, spec, rng);

  for (const char* word : {"fwd", "bwd", "fwd,bwd"}) {
    Interval I = interval_from_word(word);
    IntervalSSet is = realize_interval(I);
    TensorModule ai = tensor_sset(a, is.ss);
    HomGroup hg = hom_maps(ai.mod, b);
    LongHomotopy h = long_from_carrier(is, ai, random_hom(hg, rng, 1));
    LongHomotopy conc = concat_long(h, reverse_long(h));
    Homotopy null = nullhomotopy_concat_inverse(h);
    // endpoints: from the concatenation carrier to the trivial one
    CHECK(null.at(0) == conc.carrier);
    LongHomotopy tr = trivial_long(h.at_label(0), conc.is.iv);
    CHECK(null.at(1) == tr.carrier);
    CHECK_FALSE(null.carrier.verify().has_value());
    // rel boundary: restrictions at both end copies are constant
    int n = I.length();
    auto ends_fixed = [&](int label) {
      ModuleMap e0 = null.at(0);
      // the homotopy restricted to A[label] must be constant: compare the
      // 0- and 1- restriction along the label inclusion
      Homotopy hh = null;
      ModuleMap r0 = hh.at(0), r1 = hh.at(1);
      TensorModule cai = tensor_sset(a, conc.is.ss);
      for (int c = 0; c < a->cell_count(); ++c) {
        Element cell = cai.embed(a->generator(c),
                                 degenerate_vertex(conc.is.vertex(label), a->cell(c).dim));
        CHECK(r0.apply(cell) == r1.apply(cell));
      }
      (void)e0;
    };
    ends_fixed(0);
    ends_fixed(2 * n);

    // the symmetric variant
    Homotopy null2 = nullhomotopy_concat_inverse(reverse_long(h));
    CHECK_FALSE(null2.carrier.verify().has_value());
  }
}

TEST_CASE("interval compression") {
  std::mt19937 rng(62);
  gen::ModuleSpec spec;
  spec.n0 = 2;
  spec.n1 = 1;
  auto a = gen::random_module(Z, spec, rng);

  for (const char* word : {"fwd", "fwd,bwd", "bwd", "fwd,fwd,bwd"}) {
    Interval I = interval_from_word(word);
    EquivalenceWitness w = compress_interval(a, I);
    CHECK_FALSE(verify_witness(w).has_value());
    // endpoints map to endpoints: label 0 to label 0, top to top
    TensorModule ai = tensor_sset(a, realize_interval(I).ss);
    IntervalSSet target = realize_interval(ordered_interval(1));
    (void)target;
    CHECK(w.fwd.src->cell_count() == ai.mod->cell_count());
  }
}

TEST_CASE("convergent homotopy limit") {
  std::mt19937 rng(63);
  auto a = two_points();
  // trivial convergent homotopy: limit is trivial
  {
    Interval I = ordered_interval(3);
    LongHomotopy tr = trivial_long(identity_map(a), I);
    ConvergentData cd;
    cd.h = tr;
    std::set<int> all{0, 1};
    cd.filtration = {all};
    cd.stab = {1};
    Homotopy g = convergent_limit(cd);
    CHECK(g.at(0) == identity_map(a));
    CHECK(g.at(1) == identity_map(a));
  }
  // two-stage filtration on a module with a 1-cell
  {
    gen::ModuleSpec spec;
    spec.n0 = 2;
    spec.n1 = 1;
    auto m = gen::random_module(Z, spec, rng);
    Interval I = ordered_interval(2);
    IntervalSSet is = realize_interval(I);
    TensorModule ai = tensor_sset(m, is.ss);
    // homotopy: arbitrary on [0,1], trivial beyond 1
    HomGroup hg = hom_maps(ai.mod, m);
    ModuleMap carrier;
    bool found = false;
    for (int tries = 0; tries < 80 && !found; ++tries) {
      carrier = random_hom(hg, rng, 1);
      LongHomotopy cand = long_from_carrier(is, ai, carrier);
      // force: trivial on [1,2] (stabilized for the whole module at n=1)
      bool ok = true;
      ModuleMap at1 = cand.at_label(1);
      for (int c = 0; c < ai.mod->cell_count(); ++c) {
        const TensorCell& tc = ai.tcell(c);
        std::string nm = is.ss->name(tc.a.base);
        if (nm == "v2" || nm == "e1") {
          Element want = m->apply_mono(at1.images[tc.m_cell],
                                       tc.alpha.to_sur(m->cell(tc.m_cell).dim));
          if (nm == "e1") want = m->degeneracy(want, want.degree - 0 + ai.mod->cell(c).dim - want.degree - 1 >= 0 ? ai.mod->cell(c).dim - 1 : 0);
          // simpler: compare with the trivial extension cellwise below
        }
      }
      (void)ok;
      // instead construct directly: take any h on [0,1] and extend trivially
      found = true;
    }
    // build the stabilized homotopy by explicit extension
    auto d1 = delta_sset(1);
    TensorModule mcyl = tensor_sset(m, d1);
    HomGroup hc = hom_maps(mcyl.mod, m);
    Homotopy h01 = homotopy_from_carrier(mcyl, random_hom(hc, rng, 1));
    LongHomotopy l01 = long_from_ordinary(h01);
    LongHomotopy l12 = trivial_long(h01.at(1), ordered_interval(1));
    LongHomotopy full = concat_long(l01, l12);
    ConvergentData cd;
    cd.h = full;
    std::set<int> all;
    for (int c = 0; c < m->cell_count(); ++c) all.insert(c);
    cd.filtration = {all};
    cd.stab = {1};
    Homotopy g = convergent_limit(cd);
    CHECK(g.at(0) == full.at_label(0));
    CHECK(g.at(1) == full.at_label(1));
    CHECK_FALSE(g.carrier.verify().has_value());
  }
}

TEST_CASE("telescopes: construction, truncation consistency, shift") {
  std::mt19937 rng(64);
  gen::ModuleSpec spec;
  spec.n0 = 2;
  spec.n1 = 1;
  auto k = gen::random_module(Z, spec, rng);
  HomGroup hg = hom_maps(k, k);
  ModuleMap eta = random_hom(hg, rng, 1);
  Interval I = ordered_interval(1);

  TruncTel t2 = telescope(eta, I, 2);
  TruncTel t3 = telescope(eta, I, 3);
  CHECK_FALSE(t2.tel->check_identities().has_value());

  // Tel(* -> *) = *
  TruncTel tz = telescope(identity_map(zero_module(Z)), I, 2);
  CHECK(tz.tel->cell_count() == 0);

  // truncation consistency: stage-k cells agree across truncations
  for (int kk = 0; kk < 2; ++kk) {
    auto c2 = cellular_inclusion_cells(t2.stage_in[kk]);
    auto c3 = cellular_inclusion_cells(t3.stage_in[kk]);
    REQUIRE(c2);
    REQUIRE(c3);
    for (int c = 0; c < t2.cyl.mod->cell_count(); ++c)
      CHECK(t2.tel->cell((*c2)[c]).name == t3.tel->cell((*c3)[c]).name);
  }
  ModuleMap incl = telescope_incl(t2, t3);
  CHECK_FALSE(incl.verify().has_value());
  CHECK(cellular_inclusion_cells(incl).has_value());

  // sh o iota = iota of stage 1
  ModuleMap sh = telescope_shift(t2, t3);
  CHECK_FALSE(sh.verify().has_value());
  CHECK(compose(sh, t2.front) == compose(t3.stage_in[1], t3.cyl.front));

  // cell count: telescope of the identity on a point is the interval chain
  auto pt = point_module();
  TelIdRetract idr = telescope_id_retract(pt, I, 3);
  TensorModule chain = tensor_sset(pt, realize_interval(ordered_interval(3)).ss);
  CHECK(idr.tel.tel->cell_count() == chain.mod->cell_count());
  CHECK(compose(idr.proj, idr.tel.front) == identity_map(pt));
  CHECK_FALSE(idr.dr.homotopy.carrier.verify().has_value());
}

TEST_CASE("induced maps, extraction, box composition") {
  std::mt19937 rng(65);
  gen::ModuleSpec spec;
  spec.n0 = 2;
  spec.n1 = 1;
  auto a = gen::random_module(Z, spec, rng);
  auto b = gen::random_module(Z, spec, rng);
  HomGroup haa = hom_maps(a, a);
  HomGroup hbb = hom_maps(b, b);
  HomGroup hab = hom_maps(a, b);
  Interval J = ordered_interval(1);

  int done = 0;
  while (done < 5) {
    ModuleMap f = random_hom(haa, rng, 1);
    ModuleMap g = random_hom(hbb, rng, 1);
    ModuleMap am = random_hom(hab, rng, 1);
    // homotopy H : g a ~ a f over a length-1 interval: solve from the lattice
    auto d1 = delta_sset(1);
    TensorModule acyl = tensor_sset(a, d1);
    HomGroup hcyl = hom_maps(acyl.mod, b);
    std::optional<Homotopy> H;
    for (int tries = 0; tries < 60 && !H; ++tries) {
      Homotopy cand = homotopy_from_carrier(acyl, random_hom(hcyl, rng, 1));
      if (cand.at(0) == compose(g, am) && cand.at(1) == compose(am, f)) H = cand;
    }
    if (!H) {
      // the zero square always works
      f = zero_map(a, a);
      g = zero_map(b, b);
      am = zero_map(a, b);
      H = trivial_homotopy(zero_map(a, b));
    }
    LongHomotopy lh = long_from_ordinary(*H);

    LongCylinder mjif = long_cylinder(f, concat_interval(J, lh.is.iv));
    LongCylinder mjg = long_cylinder(g, J);
    ModuleMap ind = cylinder_induced(mjif, mjg, am, lh);
    CHECK_FALSE(ind.verify().has_value());
    CHECK(compose(ind, mjif.front) == compose(mjg.front, am));
    CHECK(compose(ind, mjif.back) == compose(mjg.back, am));

    // round trip: extract the homotopy back
    LongHomotopy back = extract_homotopy(mjif, mjg, ind, J.length());
    CHECK(back.carrier == lh.carrier);

    // telescopes
    TruncTel src = telescope(f, concat_interval(J, lh.is.iv), 2);
    TruncTel dst = telescope(g, J, 2);
    ModuleMap tind = telescope_induced(src, dst, am, lh);
    CHECK_FALSE(tind.verify().has_value());
    CHECK(compose(tind, src.front) == compose(dst.front, am));
    ++done;
  }
}

TEST_CASE("box composition equals stacking") {
  std::mt19937 rng(66);
  gen::ModuleSpec spec;
  spec.n0 = 2;
  spec.n1 = 0;
  Interval J = ordered_interval(1);
  int done = 0;
  while (done < 8) {
    auto a = gen::random_module(Z, spec, rng);
    auto b = gen::random_module(Z, spec, rng);
    auto c = gen::random_module(Z, spec, rng);
    ModuleMap f = random_hom(hom_maps(a, a), rng, 1);
    ModuleMap g = random_hom(hom_maps(b, b), rng, 1);
    ModuleMap hmap = random_hom(hom_maps(c, c), rng, 1);
    ModuleMap am = random_hom(hom_maps(a, b), rng, 1);
    ModuleMap bm = random_hom(hom_maps(b, c), rng, 1);
    auto d1 = delta_sset(1);
    TensorModule acyl = tensor_sset(a, d1);
    TensorModule bcyl = tensor_sset(b, d1);
    std::optional<Homotopy> Ha, Hb;
    HomGroup hca = hom_maps(acyl.mod, b);
    HomGroup hcb = hom_maps(bcyl.mod, c);
    for (int tries = 0; tries < 40 && !Ha; ++tries) {
      Homotopy cand = homotopy_from_carrier(acyl, random_hom(hca, rng, 1));
      if (cand.at(0) == compose(g, am) && cand.at(1) == compose(am, f)) Ha = cand;
    }
    for (int tries = 0; tries < 40 && !Hb; ++tries) {
      Homotopy cand = homotopy_from_carrier(bcyl, random_hom(hcb, rng, 1));
      if (cand.at(0) == compose(hmap, bm) && cand.at(1) == compose(bm, g)) Hb = cand;
    }
    if (!Ha || !Hb) continue;
    LongHomotopy la = long_from_ordinary(*Ha);
    LongHomotopy lb = long_from_ordinary(*Hb);

    // stacked homotopy: (H^b o a[I^b]) # (b o H^a)
    LongHomotopy left = long_whisker_right(lb, am);
    LongHomotopy right = long_whisker_left(bm, la);
    LongHomotopy stacked = concat_long(left, right);

    Interval Ia = la.is.iv, Ib = lb.is.iv;
    LongCylinder m_f = long_cylinder(f, concat_interval(concat_interval(J, Ib), Ia));
    LongCylinder m_g = long_cylinder(g, concat_interval(J, Ib));
    LongCylinder m_h = long_cylinder(hmap, J);
    ModuleMap first = cylinder_induced(m_f, m_g, am, la);
    ModuleMap second = cylinder_induced(m_g, m_h, bm, lb);
    ModuleMap composed = compose(second, first);
    ModuleMap direct = cylinder_induced(m_f, m_h, compose(bm, am), stacked);
    CHECK(composed == direct);
    ++done;
  }
}

TEST_CASE("coherence and splitting") {
  std::mt19937 rng(67);
  auto pt = point_module();
  auto two = two_points();

  // strict idempotent: projection onto the first summand
  ModuleMap e = map_from_cells(two, two,
                               {two->generator(0), two->generator(0)});
  // wait: e must be idempotent: x |-> x, y |-> x
  CHECK(compose(e, e) == e);
  CoherentIdempotent ci;
  ci.eta = e;
  ci.h = trivial_homotopy(e);  // eta^2 = eta
  ci.ksq = tensor_sset(ModulePtr(two), square_as_sset());
  // G: the fully trivial square: (x,t) collapse then e
  {
    auto sq = square_sset();
    std::vector<SimplexRef> vimg(sq->sset.count(0));
    // collapse the square to a point and apply... the constant-at-eta square:
    // build via tensor collapse composed with e
    ModuleMap collapse;
    collapse.src = ci.ksq.mod;
    collapse.dst = two;
    for (int c = 0; c < ci.ksq.mod->cell_count(); ++c) {
      const TensorCell& tc = ci.ksq.tcell(c);
      collapse.images.push_back(two->apply_mono(
          e.images[tc.m_cell], tc.alpha.to_sur(two->cell(tc.m_cell).dim)));
    }
    ci.g = collapse;
  }
  CHECK_FALSE(coherence_check(ci).has_value());

  // a perturbed G with one wrong edge is rejected
  {
    CoherentIdempotent bad = ci;
    ModuleMap wrong = bad.g;
    // change the value over one top-edge cell
    for (int c = 0; c < bad.ksq.mod->cell_count(); ++c) {
      const TensorCell& tc = bad.ksq.tcell(c);
      if (tc.a.base.dim == 1) {
        wrong.images[c] = element_add(wrong.images[c], wrong.images[c]);
        break;
      }
    }
    bad.g = wrong;
    CHECK(coherence_check(bad).has_value());
  }

  // split of the strict projection
  SplitResult sp = split_idempotent(ci, 2);
  CHECK(compose(sp.c, sp.tel.front) == ci.eta);
  CHECK_FALSE(sp.slide.carrier.verify().has_value());
  CHECK_FALSE(sp.eta_star_idem.carrier.verify().has_value());
  CHECK_FALSE(sp.square.carrier.verify().has_value());
  CHECK(compose(sp.r_stable, sp.tc.front) == telescope_incl(sp.tel, sp.tel_next));
  // Tel(e) collapses onto the image of e: phi psi = id strictly
  {
    // phi: Tel(e) -> image(e): stagewise collapse; image(e) = first summand
    Submodule im = submodule(ModulePtr(two), {0});
    ModuleMap p_im = map_from_cells(two, im.mod, {im.mod->generator(0), im.mod->generator(0)});
    ModuleMap phi;
    phi.src = sp.tel.tel;
    phi.dst = im.mod;
    phi.images.resize(sp.tel.tel->cell_count());
    std::vector<char> done(sp.tel.tel->cell_count(), 0);
    for (int k = 0; k < sp.tel.stages; ++k) {
      auto cells = cellular_inclusion_cells(sp.tel.stage_in[k]);
      REQUIRE(cells);
      for (int c = 0; c < sp.tel.cyl.mod->cell_count(); ++c) {
        int tc = (*cells)[c];
        if (done[tc]) continue;
        phi.images[tc] = p_im.apply(sp.tel.cyl.proj.images[c]);
        done[tc] = 1;
      }
    }
    CHECK_FALSE(phi.verify().has_value());
    ModuleMap psi = compose(sp.tel.front, im.inclusion);
    CHECK(compose(phi, psi) == identity_map(im.mod));
  }

  // domination: K = T(id_pt), p, i canonical
  MappingCylinder tid = mapping_cylinder(identity_map(pt));
  DeformationRetract drp = cylinder_retraction(tid);
  Homotopy hprime = inverse_homotopy(drp.homotopy);  // back o proj ~ id? orient below
  // need H' : p i ~ id_L with L = pt: p i = id strictly, so H' = trivial
  Homotopy hp = trivial_homotopy(identity_map(pt));
  CoherentIdempotent dom = coherent_from_domination(tid.back, tid.proj, hp);
  CHECK_FALSE(coherence_check(dom).has_value());
  (void)hprime;
  SplitResult sp2 = split_idempotent(dom, 2);
  CHECK(compose(sp2.c, sp2.tel.front) == dom.eta);
  CHECK_FALSE(sp2.square.carrier.verify().has_value());

  // identity eta: the full finite witness exists
  CoherentIdempotent cid;
  cid.eta = identity_map(pt);
  cid.h = trivial_homotopy(identity_map(pt));
  cid.ksq = tensor_sset(pt, square_as_sset());
  {
    ModuleMap collapse;
    collapse.src = cid.ksq.mod;
    collapse.dst = pt;
    for (int c = 0; c < cid.ksq.mod->cell_count(); ++c) {
      const TensorCell& tc = cid.ksq.tcell(c);
      collapse.images.push_back(pt->apply_mono(
          pt->generator(tc.m_cell), tc.alpha.to_sur(pt->cell(tc.m_cell).dim)));
    }
    cid.g = collapse;
  }
  SplitResult sp3 = split_idempotent(cid, 2, witness_identity(pt));
  REQUIRE(sp3.finite_witness.has_value());
  CHECK_FALSE(verify_witness(*sp3.finite_witness).has_value());
}

TEST_CASE("criterion homotopy on the strict square") {
  std::mt19937 rng(68);
  auto two = two_points();
  ModuleMap e = map_from_cells(two, two, {two->generator(0), two->generator(0)});
  // two equal strict squares with trivial homotopies
  Interval I = ordered_interval(1);
  TruncTel src = telescope(e, concat_interval(I, I), 2);
  TruncTel dst = telescope(e, I, 2);
  LongHomotopy tr = trivial_long(e, I);  // e o e = e: trivial works since e^2 = e
  CHECK(tr.at_label(0) == compose(e, e));
  Homotopy h = trivial_homotopy(e);
  // G: the doubly trivial 2-homotopy on (K[D1])[I]
  TensorModule kcyl = h.cyl;
  TensorModule ajI = tensor_sset(kcyl.mod, realize_interval(I).ss);
  ModuleMap g2;
  g2.src = ajI.mod;
  g2.dst = two;
  for (int c = 0; c < ajI.mod->cell_count(); ++c) {
    const TensorCell& tc = ajI.tcell(c);
    // collapse everything then e
    auto [mp, ap] = kcyl.components(tc.m_cell, tc.alpha);
    (void)ap;
    g2.images.push_back(
        two->apply_mono(e.images[mp.first], mp.second.to_sur(two->cell(mp.first).dim)));
  }
  Homotopy crit = criterion_homotopy(src, dst, e, tr, e, tr, h, g2, ajI);
  CHECK_FALSE(crit.carrier.verify().has_value());
  ModuleMap m1 = telescope_induced(src, dst, e, tr);
  CHECK(crit.at(0) == m1);
  CHECK(crit.at(1) == m1);
}
