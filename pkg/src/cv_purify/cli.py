"""Command-line front end: point evaluations, sweeps, figure data, oracle checks.

Subcommands
-----------
effective     closed-form effective channel at one parameter point
fig3          chi sweep at fixed T: CHSH / concurrence / success-probability
              tables and plot files for the two distillation panels
oracle-check  run a Fock-space equivalence suite and report max deviations
sweep         one-variable parameter sweep to CSV

CSV output starts with a version line ``# cv-purify v<version>``, then a
header; floats carry 12 significant digits.  Exit codes: 0 success, 1 usage
error, 2 infeasible regime, 3 tolerance breach in oracle-check.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bell import chsh_loss, chsh_tele, noisy_bell_oracle
from .effective import (InfeasibleGainError, TeleporterConfig, UnphysicalRegimeError,
                        effective_params, optimal_gain, solve_unit_transmission_gain,
                        success_probability)
from .fock import coherent_state, fock_state
from .gaussian import ChannelParams
from .grids import square_grid
from .oracle import (DEFAULT_DIM, apply_effective_system, sigma_ps_closed_form,
                     sigma_ps_numeric, teleport_arbitrary_state)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_TOLERANCE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        if np.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _write_csv(path, header, rows):
    lines = [f"# cv-purify v{__version__}", ",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(text)


def _read_config(path):
    """Flat key=value file mirroring the flags; '#' starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fp:
        for raw in fp:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {raw.strip()!r}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


def _resolve(args, config, key, cast, default):
    """Flag value if given, else config value, else default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if config and key in config:
        return cast(config[key])
    return default


def _input_populations(spec: str, dim: int):
    """Fock populations of a named input state; 'bell' means one photon per rail."""
    if spec == "vacuum":
        return np.array([1.0])
    if spec == "bell":
        return np.array([0.0, 1.0])
    if spec.startswith("fock:"):
        n = int(spec.split(":", 1)[1])
        return np.abs(fock_state(n, max(dim, n + 1))) ** 2
    if spec.startswith("coherent:"):
        alpha = complex(spec.split(":", 1)[1])
        return np.abs(coherent_state(alpha, dim)) ** 2
    raise UsageError(f"unknown input state {spec!r}; "
                     "use vacuum | fock:n | coherent:a | bell")


def _input_density(spec: str, dim: int):
    if spec == "vacuum":
        v = fock_state(0, dim)
    elif spec.startswith("fock:"):
        v = fock_state(int(spec.split(":", 1)[1]), dim)
    elif spec.startswith("coherent:"):
        v = coherent_state(complex(spec.split(":", 1)[1]), dim)
    elif spec == "superposition":
        v = (fock_state(0, dim) + fock_state(1, dim)) / np.sqrt(2.0)
    else:
        raise UsageError(f"unknown input state {spec!r} for this suite")
    return np.outer(v, v.conj())


def _resolve_gain(args, config, channel, chi, phi):
    """Return (g, label) from --g or --gain {gopt, numeric-eta1}."""
    g = _resolve(args, config, "g", float, None)
    gain = _resolve(args, config, "gain", str, None)
    if (g is None) == (gain is None):
        raise UsageError("give exactly one of --g or --gain")
    if g is not None:
        return float(g), "fixed"
    if gain == "gopt":
        if channel.excess_noise != 0.0 or phi != 1.0:
            raise UsageError("--gain gopt is the closed form for eps=0, phi=1; "
                             "use --gain numeric-eta1 otherwise")
        return optimal_gain(channel.transmission, chi), "gopt"
    if gain == "numeric-eta1":
        # numeric root-find for unit effective transmission; no closed form
        # exists for noisy channels or phi != 1
        return solve_unit_transmission_gain(channel, chi, phi), "numeric-eta1"
    raise UsageError(f"unknown gain policy {gain!r}; use gopt or numeric-eta1")


# ---------------------------------------------------------------- effective

def _cmd_effective(args):
    config = _read_config(args.config) if args.config else {}
    t = _resolve(args, config, "T", float, None)
    if t is None:
        raise UsageError("--T is required")
    eps = _resolve(args, config, "eps", float, 0.0)
    chi = _resolve(args, config, "chi", float, None)
    if chi is None:
        raise UsageError("--chi is required")
    phi = _resolve(args, config, "phi", float, 1.0)
    dim = int(_resolve(args, config, "D", int, DEFAULT_DIM))
    input_spec = _resolve(args, config, "input", str, "vacuum")
    teleporters = int(_resolve(args, config, "teleporters", int, 1))

    channel = ChannelParams(transmission=t, excess_noise=eps)
    g, policy = _resolve_gain(args, config, channel, chi, phi)
    cfg = TeleporterConfig(chi=chi, ps_gain=g, classical_gain=phi)
    eff = effective_params(channel, cfg)
    pops = _input_populations(input_spec, dim)
    p_single = success_probability(eff, pops)
    p_total = p_single ** teleporters

    rows = [
        ("T", t), ("eps", eps), ("chi", chi), ("g", g), ("phi", phi),
        ("gain_policy", policy),
        ("eta", eff.transmission),
        ("chi_ch", eff.total_input_noise),
        ("Delta", eff.excess_noise),
        ("g_eff", eff.nla_gain),
        ("G", eff.amplitude_gain),
        ("prefactor", eff.prefactor),
        ("input", input_spec),
        ("p_PS", p_single),
    ]
    if teleporters != 1:
        rows.append(("teleporters", teleporters))
        rows.append(("p_PS_total", p_total))
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key:<{width}}  {_fmt(val)}")
    if args.out:
        header = [k for k, _ in rows]
        _write_csv(args.out, header, [[v for _, v in rows]])
    return EXIT_OK


# --------------------------------------------------------------------- fig3

def _plot_description(path, title, xlabel, ylabel, yscale, curves, hlines):
    desc = {
        "title": title,
        "xlabel": xlabel,
        "ylabel": ylabel,
        "yscale": yscale,
        "curves": curves,
        "hlines": hlines,
    }
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(desc, fp, indent=1)


def _render_png(path, desc_path):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    with open(desc_path, encoding="utf-8") as fp:
        desc = json.load(fp)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for curve in desc["curves"]:
        ax.plot(curve["x"], curve["y"], curve.get("style", "-"),
                label=curve["label"])
    for y in desc["hlines"]:
        ax.axhline(y, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(desc["xlabel"])
    ax.set_ylabel(desc["ylabel"])
    ax.set_yscale(desc["yscale"])
    ax.set_title(desc["title"])
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return True


def _cmd_fig3(args):
    import os

    config = _read_config(args.config) if args.config else {}
    t = _resolve(args, config, "T", float, 0.5)
    lo = _resolve(args, config, "chi-lo", float, 0.01)
    hi = _resolve(args, config, "chi-hi", float, 0.6)
    n = int(_resolve(args, config, "points", int, 120))
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)

    chis = np.linspace(lo, hi, n)
    s_loss = chsh_loss(t)
    rows_a, rows_b = [], []
    for chi in chis:
        try:
            g = optimal_gain(t, chi)
            eff = effective_params(
                ChannelParams(t, 0.0),
                TeleporterConfig(chi=chi, ps_gain=g, classical_gain=1.0))
            tele = chsh_tele(eff.excess_noise)
            p_single = eff.prefactor * eff.nla_gain ** 2
            rows_a.append([chi, g, eff.excess_noise, s_loss.s, tele.s,
                           s_loss.c, tele.c, 0])
            rows_b.append([chi, g, p_single, p_single ** 2, 0])
        except (InfeasibleGainError, UnphysicalRegimeError):
            nan = float("nan")
            rows_a.append([chi, nan, nan, s_loss.s, nan, s_loss.c, nan, 1])
            rows_b.append([chi, nan, nan, nan, 1])

    path_a = os.path.join(outdir, "fig3a.csv")
    path_b = os.path.join(outdir, "fig3b.csv")
    _write_csv(path_a, ["chi", "g_opt", "Delta", "S_loss", "S_tele",
                        "C_loss", "C_tele", "infeasible"], rows_a)
    _write_csv(path_b, ["chi", "g_opt", "p_PS_single", "p_PS_total",
                        "infeasible"], rows_b)

    ok = [r for r in rows_a if r[-1] == 0]
    xs = [r[0] for r in ok]
    desc_a = os.path.join(outdir, "fig3a.plot.json")
    _plot_description(
        desc_a, f"CHSH quantities at T={t:g}", "chi", "S", "linear",
        [{"label": "S_tele", "x": xs, "y": [r[4] for r in ok], "style": "-"},
         {"label": "S_loss", "x": xs, "y": [r[3] for r in ok], "style": "--"}],
        hlines=[2.0])
    desc_b = os.path.join(outdir, "fig3b.plot.json")
    okb = [r for r in rows_b if r[-1] == 0]
    _plot_description(
        desc_b, f"Total success probability at T={t:g}", "chi",
        "p_PS_total", "log",
        [{"label": "p_PS_total", "x": [r[0] for r in okb],
          "y": [r[3] for r in okb], "style": "-"}],
        hlines=[])
    rendered = _render_png(os.path.join(outdir, "fig3a.png"), desc_a)
    rendered &= _render_png(os.path.join(outdir, "fig3b.png"), desc_b)

    n_ok = len(ok)
    print(f"fig3: {n_ok}/{n} feasible points -> {path_a}, {path_b}"
          + (" (+png)" if rendered else " (plot descriptions only)"))
    return EXIT_OK


# ------------------------------------------------------------- oracle-check

def _frobenius_gap(a, b):
    return float(np.linalg.norm(a - b) / abs(np.trace(b)))


def _grid_kwargs(args, default_points):
    """Quadrature overrides shared by the oracle-check suites."""
    kwargs = {}
    if args.grid_radius:
        kwargs["grid"] = square_grid(args.grid_radius,
                                     args.grid_n or default_points)
    elif args.grid_n:
        kwargs["points_per_axis"] = args.grid_n
    return kwargs


def _check_coherent(args):
    dim = args.D or DEFAULT_DIM
    tol = 1e-5
    rng = np.random.default_rng(1234)
    worst, worst_point = -1.0, None
    for _ in range(8):
        t = rng.uniform(0.3, 1.0)
        eps = rng.uniform(0.0, 0.1)
        g = rng.uniform(0.3, 0.95)
        phi = rng.uniform(0.7, 1.2)
        chi = rng.uniform(0.1, 0.5)
        alpha = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) * 1.5 / np.sqrt(2)
        channel = ChannelParams(t, eps)
        cfg = TeleporterConfig(chi=chi, ps_gain=g, classical_gain=phi)
        gap = _frobenius_gap(
            sigma_ps_numeric(alpha, channel, cfg, dim=dim,
                             **_grid_kwargs(args, 72)),
            sigma_ps_closed_form(alpha, channel, cfg, dim=dim))
        if gap > worst:
            worst, worst_point = gap, (t, eps, chi, g, phi, alpha)
    print(f"coherent suite: D={dim}, 8 points")
    print(f"  max trace-normalized Frobenius deviation = {worst:.3e} (tol {tol:g})")
    if worst > tol:
        t, eps, chi, g, phi, alpha = worst_point
        print(f"  breach at T={t:.4f} eps={eps:.4f} chi={chi:.4f} "
              f"g={g:.4f} phi={phi:.4f} alpha={alpha:.4f}")
        return EXIT_TOLERANCE
    print("PASS")
    return EXIT_OK


def _check_effective_system(args):
    dim = args.D or 24
    tol = 1e-4
    trace_tol = 1e-8
    channel = ChannelParams(0.6, 0.05)
    cfg = TeleporterConfig(chi=0.35, ps_gain=0.55, classical_gain=0.95)
    eff = effective_params(channel, cfg)
    specs = [args.input] if args.input else ["vacuum", "fock:1"]
    worst, worst_spec = -1.0, None
    for spec in specs:
        rho = _input_density(spec, dim)
        tele = teleport_arbitrary_state(rho, channel, cfg,
                                        **_grid_kwargs(args, 56))
        ref = apply_effective_system(rho, eff)
        gap = _frobenius_gap(tele, ref)
        trace_gap = abs(np.trace(tele).real
                        - success_probability(eff, np.diag(rho).real))
        print(f"  {spec}: Frobenius gap {gap:.3e}, trace gap {trace_gap:.3e}")
        if gap > worst:
            worst, worst_spec = gap, spec
        if trace_gap > trace_tol:
            print(f"  trace law breached for {spec} (tol {trace_tol:g})")
            return EXIT_TOLERANCE
    print(f"effective-system suite: D={dim}, "
          f"T={channel.transmission} eps={channel.excess_noise} "
          f"chi={cfg.chi} g={cfg.ps_gain} phi={cfg.classical_gain}")
    print(f"  max Frobenius deviation = {worst:.3e} (tol {tol:g})")
    if worst > tol:
        print(f"  breach for input {worst_spec}")
        return EXIT_TOLERANCE
    print("PASS")
    return EXIT_OK


def _check_bell(args):
    dim = args.D or 8
    tol = 1e-5
    deltas = [args.Delta] if args.Delta is not None else [0.0, 0.05, 0.1063, 0.3, 0.5]
    worst = -1.0
    worst_delta = None
    for delta in deltas:
        p, s, c = noisy_bell_oracle(delta, dim=dim, **_grid_kwargs(args, 40))
        ref = chsh_tele(delta)
        gap = max(abs(p - ref.p_check), abs(s - ref.s_cond), abs(c - ref.c_cond))
        print(f"  Delta={delta:g}: |dp|={abs(p - ref.p_check):.2e} "
              f"|dS|={abs(s - ref.s_cond):.2e} |dC|={abs(c - ref.c_cond):.2e}")
        if gap > worst:
            worst, worst_delta = gap, delta
    print(f"bell suite: D={dim}")
    print(f"  max closed-form deviation = {worst:.3e} (tol {tol:g})")
    if worst > tol:
        print(f"  breach at Delta={worst_delta}")
        return EXIT_TOLERANCE
    print("PASS")
    return EXIT_OK


def _cmd_oracle_check(args):
    suites = {
        "coherent": _check_coherent,
        "effective-system": _check_effective_system,
        "bell": _check_bell,
    }
    if args.suite not in suites:
        raise UsageError(f"unknown suite {args.suite!r}; "
                         f"choose from {', '.join(suites)}")
    return suites[args.suite](args)


# -------------------------------------------------------------------- sweep

_SWEEP_OUTPUTS = ("eta", "Delta", "g_eff", "p_PS", "S_loss", "S_tele",
                  "C_loss", "C_tele")


def _cmd_sweep(args):
    config = _read_config(args.config) if args.config else {}
    var = _resolve(args, config, "var", str, None)
    if var not in ("chi", "T", "g", "Delta"):
        raise UsageError("--var must be one of chi, T, g, Delta")
    lo = _resolve(args, config, "lo", float, None)
    hi = _resolve(args, config, "hi", float, None)
    n = _resolve(args, config, "points", int, None)
    if lo is None or hi is None or n is None:
        raise UsageError("--lo, --hi and --points are required")
    if not lo < hi:
        raise UsageError(f"empty range: lo={lo} must be < hi={hi}")
    if n < 2:
        raise UsageError(f"need at least 2 points, got {n}")

    outputs = _resolve(args, config, "outputs", str, ",".join(_SWEEP_OUTPUTS))
    outputs = [o.strip() for o in outputs.split(",") if o.strip()]
    unknown = [o for o in outputs if o not in _SWEEP_OUTPUTS]
    if unknown:
        raise UsageError(f"unknown outputs: {', '.join(unknown)}")

    grid = np.linspace(lo, hi, n)

    if var == "Delta":
        bad = [o for o in outputs if o in ("eta", "Delta", "g_eff", "p_PS")]
        if bad:
            raise UsageError("sweeping Delta supports only the Bell outputs "
                             "(S_loss, S_tele, C_loss, C_tele)")
        t = _resolve(args, config, "T", float, 0.5)
        header = ["idx", "Delta", "T"] + outputs
        rows = []
        for i, delta in enumerate(grid):
            loss, tele = chsh_loss(t), chsh_tele(delta)
            vals = {"S_loss": loss.s, "S_tele": tele.s,
                    "C_loss": loss.c, "C_tele": tele.c}
            rows.append([i, delta, t] + [vals[o] for o in outputs])
        _write_csv(args.out, header, rows)
        return EXIT_OK

    t0 = _resolve(args, config, "T", float, 0.5)
    eps = _resolve(args, config, "eps", float, 0.0)
    chi0 = _resolve(args, config, "chi", float, 0.31)
    phi = _resolve(args, config, "phi", float, 1.0)
    dim = int(_resolve(args, config, "D", int, DEFAULT_DIM))
    input_spec = _resolve(args, config, "input", str, "vacuum")
    g_flag = _resolve(args, config, "g", float, None)
    gain = _resolve(args, config, "gain", str, None)
    if var != "g" and g_flag is None and gain is None:
        gain = "gopt"
    if gain == "gopt" and (eps != 0.0 or phi != 1.0):
        raise UsageError("gain policy gopt requires eps=0 and phi=1")

    header = (["idx", "T", "eps", "chi", "g", "phi"]
              + outputs + ["trunc_loss", "infeasible"])
    rows = []
    for i, val in enumerate(grid):
        t, chi, g = t0, chi0, g_flag
        if var == "T":
            t = val
        elif var == "chi":
            chi = val
        elif var == "g":
            g = val
        try:
            if g is None:
                if gain == "gopt":
                    g = optimal_gain(t, chi)
                elif gain == "numeric-eta1":
                    g = solve_unit_transmission_gain(ChannelParams(t, eps), chi, phi)
                else:
                    raise UsageError(f"unknown gain policy {gain!r}")
            channel = ChannelParams(t, eps)
            cfg = TeleporterConfig(chi=chi, ps_gain=g, classical_gain=phi)
            eff = effective_params(channel, cfg)
            pops = _input_populations(input_spec, dim)
            loss, tele = chsh_loss(t), chsh_tele(eff.excess_noise)
            vals = {
                "eta": eff.transmission,
                "Delta": eff.excess_noise,
                "g_eff": eff.nla_gain,
                "p_PS": success_probability(eff, pops),
                "S_loss": loss.s,
                "S_tele": tele.s,
                "C_loss": loss.c,
                "C_tele": tele.c,
            }
            trunc = abs(1.0 - float(np.sum(pops)))
            rows.append([i, t, eps, chi, g, phi]
                        + [vals[o] for o in outputs] + [trunc, 0])
        except (InfeasibleGainError, UnphysicalRegimeError):
            nan = float("nan")
            rows.append([i, t, eps, chi, nan, phi]
                        + [nan] * len(outputs) + [nan, 1])
    _write_csv(args.out, header, rows)
    return EXIT_OK


# --------------------------------------------------------------------- main

def _build_parser():
    parser = _Parser(prog="cv-purify",
                     description="Teleportation with Gaussian post-selection: "
                                 "effective channel, oracles, Bell distillation")
    parser.add_argument("--version", action="version",
                        version=f"cv-purify v{__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_gain=True):
        p.add_argument("--T", type=float, default=None, help="channel transmission")
        p.add_argument("--eps", type=float, default=None,
                       help="input-referred excess noise (shot-noise units)")
        p.add_argument("--chi", type=float, default=None, help="EPR parameter")
        if with_gain:
            p.add_argument("--g", type=float, default=None,
                           help="post-selection gain in (0, 1]")
            p.add_argument("--gain", type=str, default=None,
                           help="gain policy: gopt (closed form, eps=0, phi=1) or "
                                "numeric-eta1 (root-find, beyond the closed forms)")
        p.add_argument("--phi", type=float, default=None,
                       help="classical displacement gain")
        p.add_argument("--D", type=int, default=None, help="Fock truncation dimension")
        p.add_argument("--grid-n", type=int, default=None,
                       help="quadrature points per axis")
        p.add_argument("--grid-radius", type=float, default=None,
                       help="quadrature cutoff radius override")
        p.add_argument("--out", type=str, default=None, help="output path")
        p.add_argument("--config", type=str, default=None,
                       help="key=value config file; flags win")

    p_eff = sub.add_parser("effective", help="effective channel at one point")
    add_common(p_eff)
    p_eff.add_argument("--input", type=str, default=None,
                       help="vacuum | fock:n | coherent:a | bell")
    p_eff.add_argument("--teleporters", type=int, default=None,
                       help="number of independent teleporters (success "
                            "probability is raised to this power)")

    p_fig = sub.add_parser("fig3", help="distillation sweep tables and plots")
    add_common(p_fig, with_gain=False)
    p_fig.add_argument("--chi-lo", type=float, default=None)
    p_fig.add_argument("--chi-hi", type=float, default=None)
    p_fig.add_argument("--points", type=int, default=None)

    p_chk = sub.add_parser("oracle-check", help="Fock-space equivalence suites")
    p_chk.add_argument("suite", type=str,
                       help="coherent | effective-system | bell")
    p_chk.add_argument("--D", type=int, default=None)
    p_chk.add_argument("--grid-n", type=int, default=None)
    p_chk.add_argument("--grid-radius", type=float, default=None)
    p_chk.add_argument("--Delta", type=float, default=None,
                       help="single excess-noise value for the bell suite")
    p_chk.add_argument("--input", type=str, default=None,
                       help="input state for the effective-system suite")

    p_sw = sub.add_parser("sweep", help="one-variable sweep to CSV")
    add_common(p_sw)
    p_sw.add_argument("--var", type=str, default=None,
                      help="swept variable: chi | T | g | Delta")
    p_sw.add_argument("--lo", type=float, default=None)
    p_sw.add_argument("--hi", type=float, default=None)
    p_sw.add_argument("--points", type=int, default=None)
    p_sw.add_argument("--outputs", type=str, default=None,
                      help=f"comma list from: {', '.join(_SWEEP_OUTPUTS)}")
    p_sw.add_argument("--input", type=str, default=None,
                      help="input state for p_PS")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        commands = {
            "effective": _cmd_effective,
            "fig3": _cmd_fig3,
            "oracle-check": _cmd_oracle_check,
            "sweep": _cmd_sweep,
        }
        return commands[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleGainError, UnphysicalRegimeError) as exc:
        print(f"infeasible regime: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
