use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use koszul_core::complex::{cone, Complex, HomologyReport};
use koszul_core::deformation::{CdgAlgebra, DeformationData};
use koszul_core::dgmod::{CdgModule, UComplex};
use koszul_core::functors::{adjunction_check, apply_f, apply_g, counit, unit, UAlgebra};
use koszul_core::selftest::{selftest, SelftestOptions};
use koszul_core::suite::cofree::t_truncate;
use koszul_core::suite::null::{null_test_cofree, null_test_free, null_test_free_f, spliced_exterior, CofreeTest};
use koszul_core::suite::regrade::BigradedComplex;
use koszul_core::suite::{homology, koszulness_check, minimize};
use koszul_core::Field;
use serde::Serialize;

use crate::error::{CliError, Context};
use crate::report::{dims_line, element, homology_table, word, Outcome, Provenance, Report, ResolvedBounds};
use crate::schema::{CdgModuleSpec, ProblemFile};

pub type CmdResult = Result<Outcome, CliError>;

pub struct Ctx {
    pub problem: Option<ProblemFile>,
    pub input: Option<String>,
    pub bounds: ResolvedBounds,
    pub flags: BTreeMap<String, String>,
}

impl Ctx {
    fn problem(&self) -> Result<&ProblemFile, CliError> {
        self.problem.as_ref().ok_or_else(|| CliError::Input("this command needs a problem file".into()))
    }

    fn data(&self) -> Result<DeformationData, CliError> {
        self.problem()?.deformation().during("reading the presentation")
    }

    /// The dg algebra `A!` at the degree bound; never below 3.
    fn cdga(&self, data: &DeformationData) -> Result<CdgAlgebra, CliError> {
        data.build_cdga(self.bounds.degree.max(3)).during("building the dg algebra")
    }

    fn u(&self, data: &DeformationData) -> Result<Arc<UAlgebra>, CliError> {
        let level = usize::try_from(self.bounds.filtration).map_err(|_| CliError::Input("negative filtration".into()))?;
        Ok(Arc::new(UAlgebra::new(data, level).during("building U")?))
    }

    fn complex(&self, name: &str, data: &DeformationData) -> Result<UComplex, CliError> {
        let m = self.problem()?.complex(name).during(&format!("reading complex {name}"))?;
        match m.validate(data).violation {
            Some(v) => Err(CliError::Input(format!("complex {name}: {v}"))),
            None => Ok(m),
        }
    }

    fn cdg_module(&self, name: &str, cdga: &CdgAlgebra) -> Result<CdgModule, CliError> {
        let n = self.problem()?.cdg_module(name).during(&format!("reading cdg module {name}"))?;
        match n.validate(cdga).violation {
            Some(v) => Err(CliError::Input(format!("cdg module {name}: {v}"))),
            None => Ok(n),
        }
    }

    fn outcome(&self, command: &str, pass: bool, result: impl Serialize, text: String) -> CmdResult {
        let provenance = Provenance {
            tool: concat!("koszul-kit ", env!("CARGO_PKG_VERSION")).into(),
            input: self.input.clone(),
            field: self.problem.as_ref().map(|p| p.field.clone()),
            bounds: self.bounds.clone(),
            flags: self.flags.clone(),
        };
        let result = serde_json::to_value(result).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Outcome { report: Report { command: command.into(), pass, provenance, result }, text })
    }
}

fn cdg_dims(n: &CdgModule) -> (i64, Vec<usize>) {
    let c = n.complex();
    (c.start(), c.degrees().map(|p| c.dim(p)).collect())
}

fn complex_dims(c: &Complex) -> (i64, Vec<usize>) {
    (c.start(), c.degrees().map(|p| c.dim(p)).collect())
}

#[derive(Serialize)]
struct Dims {
    start: i64,
    dims: Vec<usize>,
}

impl Dims {
    fn of(c: &Complex) -> Self {
        let (start, dims) = complex_dims(c);
        Dims { start, dims }
    }
}

pub fn dual(ctx: &Ctx) -> CmdResult {
    let p = ctx.problem()?.presentation().during("reading the presentation")?;
    let d = p.quadratic_dual();
    let double_dual = p.double_dual_check(ctx.bounds.degree).during("double dual")?;
    let file = ProblemFile::from_presentation(&d);
    let mut text = format!("generators: {}\nrelations: {}\n", d.generators().join(" "), d.relation_dim());
    for row in &file.relations {
        let cells: Vec<String> = row.iter().map(|x| serde_json::to_string(x).unwrap_or_default()).collect();
        let _ = writeln!(text, "  [{}]", cells.join(", "));
    }
    let _ = writeln!(text, "double dual agrees through degree {}: {double_dual}", ctx.bounds.degree);
    #[derive(Serialize)]
    struct Out {
        dual: ProblemFile,
        relation_dim: usize,
        double_dual: bool,
    }
    ctx.outcome("dual", double_dual, Out { dual: file, relation_dim: d.relation_dim(), double_dual }, text)
}

pub fn truncate(ctx: &Ctx) -> CmdResult {
    let p = ctx.problem()?.presentation().during("reading the presentation")?;
    let n = ctx.bounds.degree;
    let a = p.truncate(n).during("truncating A")?;
    let ad = p.quadratic_dual().truncate(n).during("truncating A!")?;
    let names = p.generators();
    let basis: Vec<Vec<String>> = (0..=n).map(|k| a.basis_words(k).iter().map(|w| word(names, w)).collect()).collect();
    let mut text = String::from("degree  dim A  dim A!  basis of A\n");
    for k in 0..=n {
        let shown = if basis[k].len() > 8 { format!("{} ...", basis[k][..8].join(" ")) } else { basis[k].join(" ") };
        let _ = writeln!(text, "{k:>6}  {:>5}  {:>6}  {shown}", a.dim(k), ad.dim(k));
    }
    #[derive(Serialize)]
    struct Out {
        dims: Vec<usize>,
        dual_dims: Vec<usize>,
        basis: Vec<Vec<String>>,
    }
    ctx.outcome("truncate", true, Out { dims: a.dims(), dual_dims: ad.dims(), basis }, text)
}

pub fn pbw(ctx: &Ctx) -> CmdResult {
    let rep = ctx.data()?.pbw_check();
    let text = format!(
        "dim(P ∩ (k + V)): {}\ncondition 1: {}\ncondition 2: {}\ncondition 3: {}\n",
        rep.intersection_dim, rep.cond1, rep.cond2, rep.cond3
    );
    ctx.outcome("pbw", rep.all_pass, rep, text)
}

pub fn cdga(ctx: &Ctx) -> CmdResult {
    let data = ctx.data()?;
    let c = data.build_cdga_unchecked(ctx.bounds.degree.max(3)).during("building the dg algebra")?;
    let names = c.dual().presentation().generators().to_vec();
    let deg2 = c.dual().basis_words(2).to_vec();
    let curvature = element(&names, &deg2, c.curvature());
    let differential: Vec<(String, String)> =
        (0..c.ngens()).map(|g| (names[g].clone(), element(&names, &deg2, &c.d1(g)))).collect();
    let inv = c.invariants().during("checking the dg algebra")?;
    let mut text = format!("c = {curvature}\n");
    for (g, v) in &differential {
        let _ = writeln!(text, "d({g}) = {v}");
    }
    let dims: Vec<usize> = (0..=c.bound()).map(|k| c.dim(k)).collect();
    let _ = writeln!(text, "dims: {dims:?}");
    let _ = writeln!(text, "leibniz: {}, d(c) = 0: {}, d² = [c, -]: {}", inv.leibniz, inv.d_of_c, inv.d_squared);
    #[derive(Serialize)]
    struct Out {
        generators: Vec<String>,
        curvature: String,
        differential: BTreeMap<String, String>,
        dims: Vec<usize>,
        invariants: koszul_core::deformation::CdgaReport,
    }
    let out = Out { generators: names, curvature, differential: differential.into_iter().collect(), dims, invariants: inv };
    ctx.outcome("cdga", inv.all_hold(), out, text)
}

pub fn build_u(ctx: &Ctx) -> CmdResult {
    let data = ctx.data()?;
    let level = usize::try_from(ctx.bounds.filtration).map_err(|_| CliError::Input("negative filtration".into()))?;
    let rep = data.build_u(level).during("building U")?;
    let mut text = String::from("level  dim gr_n U  dim A_n\n");
    for (n, (g, a)) in rep.gr_dims.iter().zip(&rep.a_dims).enumerate() {
        let _ = writeln!(text, "{n:>5}  {g:>10}  {a:>7}");
    }
    let _ = writeln!(text, "gr U = A through the bound: {}", rep.pbw_through_bound);
    #[derive(Serialize)]
    struct Out {
        gr_dims: Vec<usize>,
        a_dims: Vec<usize>,
        pbw_through_bound: bool,
    }
    let pass = rep.pbw_through_bound;
    ctx.outcome("build-u", pass, Out { gr_dims: rep.gr_dims, a_dims: rep.a_dims, pbw_through_bound: pass }, text)
}

pub fn koszul_check(ctx: &Ctx) -> CmdResult {
    let p = ctx.problem()?.presentation().during("reading the presentation")?;
    let rep = koszulness_check(&p, ctx.bounds.degree).during("koszulness check")?;
    let mut text = String::from("strand  exact  dims\n");
    for s in &rep.strands {
        let _ = writeln!(text, "{:>6}  {:>5}  {:?}", s.n, s.exact, s.dims);
    }
    let _ = writeln!(text, "Ext diagonal: {}, matches A!: {}", rep.ext_diagonal, rep.ext_matches_dual);
    if let Some(w) = rep.witness() {
        let _ = writeln!(text, "first inexact strand: {} at position {:?}", w.n, w.failing_position);
    }
    ctx.outcome("koszul-check", rep.pass(), &rep, text)
}

pub fn apply_f_cmd(ctx: &Ctx, name: &str, i: i64) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let n = ctx.cdg_module(name, &cdga)?;
    let u = ctx.u(&data)?;
    let (_, c) = apply_f(&u, &n, i).during("applying F")?;
    let (w0, w1) = ctx.bounds.window;
    let h = c.homology(w0, w1);
    let text = dims_line(&format!("F_{i}({name})"), c.start(), &complex_dims(&c).1) + &homology_table(&h);
    #[derive(Serialize)]
    struct Out {
        complex: Dims,
        homology: HomologyReport,
    }
    ctx.outcome("apply-f", true, Out { complex: Dims::of(&c), homology: h }, text)
}

pub fn apply_g_cmd(ctx: &Ctx, name: &str) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let m = ctx.complex(name, &data)?;
    let (w0, w1) = ctx.bounds.window;
    let g = apply_g(&m, &cdga, 0, w0).during("applying G")?;
    let h = g.module.homology(&cdga, w0, w1).during("homology of G")?;
    let text = dims_line(&format!("G({name})"), g.module.start(), &cdg_dims(&g.module).1) + &homology_table(&h);
    #[derive(Serialize)]
    struct Out {
        module: CdgModuleSpec,
        homology: HomologyReport,
    }
    ctx.outcome("apply-g", true, Out { module: ProblemFile::cdg_module_spec(&g.module), homology: h }, text)
}

pub fn adjoint_check(ctx: &Ctx, n_name: &str, m_name: &str) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let n = ctx.cdg_module(n_name, &cdga)?;
    let m = ctx.complex(m_name, &data)?;
    let rep = adjunction_check(&cdga, &n, &m).during("adjunction check")?;
    let text = format!(
        "degrees: {:?}\nHom_U(F N, M): {:?}\nHom_A!(N, G M): {:?}\nlinear: {}, bijective: {}, differentials agree: {}\ndegree-0 cycles: {}\n",
        rep.degrees,
        rep.dims_u_side,
        rep.dims_a_side,
        rep.image_linear,
        rep.bijective,
        rep.differentials_agree,
        rep.degree_zero_cycles
    );
    ctx.outcome("adjoint-check", rep.holds(), &rep, text)
}

#[derive(Serialize)]
struct ConeOut {
    morphism: bool,
    cone_acyclic: bool,
    cone_homology: Vec<(i64, Option<i64>, usize)>,
}

pub fn unit_cmd(ctx: &Ctx, name: &str, i: i64) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let n = ctx.cdg_module(name, &cdga)?;
    let u = ctx.u(&data)?;
    let un = unit(&u, &cdga, &n, i, ctx.bounds.window.0).during("unit")?;
    let morphism = n.is_morphism(&un.map, &un.gf.module);
    let h = cone(&un.map, n.complex(), un.gf.module.complex()).full_homology();
    let out = ConeOut { morphism, cone_acyclic: h.acyclic_interior(), cone_homology: h.nonzero() };
    let text = format!(
        "unit {name} -> G F_{i}({name})\nmorphism: {}\ncone acyclic away from the edges: {}\n",
        out.morphism, out.cone_acyclic
    );
    ctx.outcome("unit", out.morphism && out.cone_acyclic, out, text)
}

pub fn counit_cmd(ctx: &Ctx, name: &str, i: i64) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let m = ctx.complex(name, &data)?;
    let u = ctx.u(&data)?;
    let c = counit(&u, &cdga, &m, i, ctx.bounds.window.0).during("counit")?;
    let morphism = c.map.is_chain_map(&c.fg, &c.target);
    let h = cone(&c.map, &c.fg, &c.target).full_homology();
    let out = ConeOut { morphism, cone_acyclic: h.acyclic_interior(), cone_homology: h.nonzero() };
    let text = format!(
        "counit F_{i} G({name}) -> {name}\nchain map: {}\ncone acyclic away from the edges: {}\n",
        out.morphism, out.cone_acyclic
    );
    ctx.outcome("counit", out.morphism && out.cone_acyclic, out, text)
}

pub fn ce(ctx: &Ctx, name: &str) -> CmdResult {
    let data = ctx.data()?;
    let m = ctx.problem()?.module(name).during(&format!("reading module {name}"))?;
    if let Some(v) = m.validate(&data).violation {
        return Err(CliError::Input(format!("module {name}: {v}")));
    }
    let k = homology::koszul_ce_complex(&data, &m, ctx.bounds.filtration).during("Koszul complex")?;
    let chain = k.augmentation.is_chain_map(&k.complex, &k.target);
    let cone_h = cone(&k.augmentation, &k.complex, &k.target).full_homology();
    let h = k.complex.full_homology();
    let text = dims_line("complex", k.complex.start(), &complex_dims(&k.complex).1)
        + &homology_table(&h)
        + &format!("augmentation is a quasi-isomorphism: {}\n", chain && cone_h.acyclic_interior());
    #[derive(Serialize)]
    struct Out {
        complex: Dims,
        homology: HomologyReport,
        augmentation_chain_map: bool,
        resolves: bool,
    }
    let resolves = chain && cone_h.acyclic_interior();
    let out = Out { complex: Dims::of(&k.complex), homology: h, augmentation_chain_map: chain, resolves };
    ctx.outcome("ce", resolves, out, text)
}

pub fn tor_ext(ctx: &Ctx, name: &str, range: (i64, i64), ext: bool) -> CmdResult {
    let data = ctx.data()?;
    let m = ctx.complex(name, &data)?;
    let (cmd, h) = if ext {
        ("ext", homology::ext(&data, &m, range).during("Ext")?)
    } else {
        ("tor", homology::tor(&data, &m, range).during("Tor")?)
    };
    let text = homology_table(&h);
    ctx.outcome(cmd, true, &h, text)
}

pub fn minimize_cmd(ctx: &Ctx, name: &str) -> CmdResult {
    let data = ctx.data()?;
    let m = ctx.complex(name, &data)?;
    let min = minimize::minimize_g(&data, &m, ctx.bounds.window.0).during("minimization")?;
    let r = &min.report;
    let text = dims_line("G", min.g.start(), &cdg_dims(&min.g).1)
        + &dims_line("minimal", min.minimal.start(), &cdg_dims(&min.minimal).1)
        + &format!(
            "socle = homology: {}, minimal differential on socle is zero: {}\nmaps are morphisms: {}, retraction exact: {}, homotopy certified: {}\n",
            r.socle_matches_homology,
            r.socle_differential_zero,
            r.maps_are_morphisms,
            r.retraction_exact,
            r.homotopy_certified
        );
    #[derive(Serialize)]
    struct Out<'a> {
        minimal: CdgModuleSpec,
        report: &'a minimize::MinimizationReport,
    }
    let out = Out { minimal: ProblemFile::cdg_module_spec(&min.minimal), report: r };
    ctx.outcome("minimize", r.verified(), out, text)
}

fn null_text(rep: &koszul_core::suite::null::NullReport, test: &str) -> String {
    let mut s = format!("window: {:?}\nacyclic: {}\n{test} acyclic: {}\nin null system: {}\n", rep.window, rep.acyclic, rep.test_acyclic, rep.in_null_system);
    if let Some(h) = rep.nullhomotopic {
        let _ = writeln!(s, "nullhomotopic: {h}");
    }
    if let Some(f) = rep.f_matches_socle {
        let _ = writeln!(s, "H F_i agrees with the socle: {f}");
    }
    s
}

pub enum FreeInput<'a> {
    Complex(&'a str),
    FOf(&'a str, i64),
}

pub fn null_free(ctx: &Ctx, input: FreeInput<'_>, homotopy: bool) -> CmdResult {
    let data = ctx.data()?;
    let u = ctx.u(&data)?;
    let rep = match input {
        FreeInput::Complex(name) => {
            let p = ctx.complex(name, &data)?;
            null_test_free(&u, &p, ctx.bounds.window, homotopy).during("free null test")?
        }
        FreeInput::FOf(name, i) => {
            let cdga = ctx.cdga(&data)?;
            let n = ctx.cdg_module(name, &cdga)?;
            let (fc, _) = apply_f(&u, &n, i).during("applying F")?;
            null_test_free_f(&fc, i, ctx.bounds.window).during("free null test")?
        }
    };
    let text = null_text(&rep, "fiber");
    ctx.outcome("null-free", true, &rep, text)
}

pub fn null_cofree(ctx: &Ctx, name: Option<&str>, spliced: Option<usize>, r: i64, homotopy: bool) -> CmdResult {
    let (module, cdga, r) = match (name, spliced) {
        (_, Some(depth)) => {
            let field = match &ctx.problem {
                Some(p) => p.field()?,
                None => Field::Rational,
            };
            let (x, cdga) = spliced_exterior(field, depth).during("spliced complex")?;
            // Built in action degree 0; the window is read there.
            (x.regrade(1).to_module().during("spliced complex")?, cdga, 0)
        }
        (Some(name), None) => {
            let data = ctx.data()?;
            let cdga = ctx.cdga(&data)?;
            (ctx.cdg_module(name, &cdga)?, cdga, r)
        }
        (None, None) => return Err(CliError::Input("give --cdg-module or --spliced".into())),
    };
    let opts = CofreeTest { r, window: ctx.bounds.window, f_check: None, homotopy };
    let rep = null_test_cofree(&module, &cdga, &opts).during("cofree null test")?;
    let text = null_text(&rep, "socle");
    ctx.outcome("null-cofree", true, &rep, text)
}

pub fn t_trunc(ctx: &Ctx, name: &str, p: i64) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let i = ctx.cdg_module(name, &cdga)?;
    let (sub, quot) = t_truncate(&i, &cdga, p).during("t-truncation")?;
    let text = dims_line(&format!("t^<={p}"), sub.start(), &cdg_dims(&sub).1)
        + &dims_line(&format!("t_>{p}"), quot.start(), &cdg_dims(&quot).1);
    #[derive(Serialize)]
    struct Out {
        sub: CdgModuleSpec,
        quotient: CdgModuleSpec,
    }
    let out = Out { sub: ProblemFile::cdg_module_spec(&sub), quotient: ProblemFile::cdg_module_spec(&quot) };
    ctx.outcome("t-trunc", true, out, text)
}

pub fn sigma_trunc(ctx: &Ctx, complex: Option<&str>, cdg: Option<&str>, p: i64) -> CmdResult {
    let (upper, lower) = match (complex, cdg) {
        (Some(name), None) => {
            let data = ctx.data()?;
            let (a, b) = ctx.complex(name, &data)?.sigma_truncate(p);
            (Dims::of(a.complex()), Dims::of(b.complex()))
        }
        (None, Some(name)) => {
            let data = ctx.data()?;
            let cdga = ctx.cdga(&data)?;
            let (a, b) = ctx.cdg_module(name, &cdga)?.sigma_truncate(p);
            (Dims::of(a.complex()), Dims::of(b.complex()))
        }
        _ => return Err(CliError::Input("give exactly one of --complex and --cdg-module".into())),
    };
    let text = dims_line(&format!("sigma>{p}"), upper.start, &upper.dims) + &dims_line(&format!("sigma<={p}"), lower.start, &lower.dims);
    #[derive(Serialize)]
    struct Out {
        upper: Dims,
        lower: Dims,
    }
    ctx.outcome("sigma-trunc", true, Out { upper, lower }, text)
}

pub fn regrade(ctx: &Ctx, name: &str, r: i64) -> CmdResult {
    let data = ctx.data()?;
    let cdga = ctx.cdga(&data)?;
    let m = ctx.cdg_module(name, &cdga)?;
    let x = BigradedComplex::from_module(&m, &cdga).during("regrading")?;
    let y = x.regrade(r);
    let round_trip = y.regrade(x.r()) == x;
    let consistent = y.degrees_consistent();
    let support = y.support();
    let mut text = format!("action degree {} -> {r}\n   p     q  dim\n", x.r());
    for ((p, q), d) in &support {
        let _ = writeln!(text, "{p:>4}  {q:>4}  {d:>3}");
    }
    let _ = writeln!(text, "degrees consistent: {consistent}, round trip exact: {round_trip}");
    #[derive(Serialize)]
    struct Out {
        from: i64,
        to: i64,
        support: Vec<((i64, i64), usize)>,
        degrees_consistent: bool,
        round_trip: bool,
    }
    let out = Out { from: x.r(), to: r, support, degrees_consistent: consistent, round_trip };
    ctx.outcome("regrade", consistent && round_trip, out, text)
}

pub fn selftest_cmd(ctx: &Ctx, seed: Option<u64>, corrupt_signs: bool) -> CmdResult {
    let rep = selftest(&SelftestOptions { seed, corrupt_signs });
    let mut text = format!("seed {}\n", rep.seed);
    for item in &rep.items {
        let _ = writeln!(text, "{:<20} {}  {}", item.name, if item.pass { "PASS" } else { "FAIL" }, item.detail);
    }
    ctx.outcome("selftest", rep.all_pass(), &rep, text)
}
