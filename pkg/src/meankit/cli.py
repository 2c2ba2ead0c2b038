"""Command-line front end: compute means, run homogenizations, verify suites.

Exit codes: 0 success/pass, 1 verification fail or inconclusive (witness
printed), 2 usage or configuration error, 3 numerical failure (the error
class name is printed).

Structured output is a single JSON document per run with a fixed key order;
every number round-trips at full precision.  Limit tables can additionally be
emitted as CSV with columns ``t,value``.
"""

from __future__ import annotations

import json
import math
import sys
from typing import Any

import click

from .classic_means import (
    common_power_order,
    power_mean,
    qa_local_homogenization,
    quasiarithmetic_mean,
)
from .domain import IntervalDomain, MeanKind, make_weighted_sample, positive_reals
from .errors import MeanKitError
from .expr import (
    Kernel2,
    ScalarFunction,
    cosh_generator,
    difference_kernel,
    exp_generator,
    kernel_from_expression,
    log_generator,
    power_generator,
    ratio_kernel,
    scalar_from_expression,
    shifted_power_generator,
    sign_kernel,
)
from .homogenize import (
    LimitEstimate,
    deviation_handle,
    envelope_pair,
    kernel_homogenization,
    local_homogenization,
    power_handle,
    quasiarithmetic_handle,
    semideviation_handle,
)
from .semideviation import SemidevMeanConfig, deviation_mean, semideviation_mean
from .verify import (
    Report,
    SamplePlan,
    hoelder_preset,
    minkowski_preset,
    verify_cei,
    verify_comparison,
    verify_homi,
    verify_jensen,
    verify_lemma_lim,
    verify_sandwich,
    verify_tei,
)

MEAN_FORMULAS = {
    "power": "power mean = (sum_i w_i x_i^p / sum_i w_i)^(1/p); p=0 geometric, -inf/+inf min/max over positive weights",
    "qa": "quasiarithmetic mean = f_inv(sum_i w_i f(x_i) / sum_i w_i)",
    "deviation": "deviation mean = the root of D(y) = sum_i w_i K(x_i, y)",
    MeanKind.LOWER_WEAK.value: "lower-weak mean = inf{y : D(y) <= 0},  D(y) = sum_i w_i K(x_i, y)",
    MeanKind.LOWER_STRICT.value: "lower-strict mean = inf{y : D(y) < 0},  D(y) = sum_i w_i K(x_i, y)",
    MeanKind.UPPER_STRICT.value: "upper-strict mean = sup{y : D(y) > 0},  D(y) = sum_i w_i K(x_i, y)",
    MeanKind.UPPER_WEAK.value: "upper-weak mean = sup{y : D(y) >= 0},  D(y) = sum_i w_i K(x_i, y)",
}


# --- flag parsing ----------------------------------------------------------------


def _parse_float(text: str, label: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise click.UsageError(f"{label}: cannot parse {text!r} as a number") from None
    if math.isnan(value):
        raise click.UsageError(f"{label}: NaN is not allowed")
    return value


def _parse_vector(text: str, label: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise click.UsageError(f"{label}: empty vector")
    return [_parse_float(s, label) for s in items]


def _parse_domain(text: str | None) -> IntervalDomain:
    if text is None:
        return positive_reals()
    parts = _parse_vector(text, "--domain")
    if len(parts) != 2:
        raise click.UsageError("--domain takes exactly two comma-separated bounds")
    try:
        return IntervalDomain(parts[0], parts[1])
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _parse_range(text: str | None, label: str) -> tuple[float, float] | None:
    if text is None:
        return None
    parts = _parse_vector(text, label)
    if len(parts) != 2 or not parts[0] < parts[1]:
        raise click.UsageError(f"{label} must be 'lo,hi' with lo < hi")
    return parts[0], parts[1]


def resolve_generator(spec: str, domain: IntervalDomain | None = None) -> ScalarFunction:
    """Generator spec: power:P | log | exp | cosh | shifted_power:Q,C | expr:TEXT.

    An explicit ``domain`` restricts the catalog default.
    """
    if spec.startswith("expr:"):
        return scalar_from_expression(spec[5:], domain or positive_reals())
    name, _, params = spec.partition(":")
    generator = None
    if name == "power":
        generator = power_generator(_parse_float(params, "power exponent"))
    elif name == "log":
        generator = log_generator()
    elif name == "exp":
        generator = exp_generator()
    elif name == "cosh":
        generator = cosh_generator()
    elif name == "shifted_power":
        values = _parse_vector(params, "shifted_power parameters")
        if len(values) != 2:
            raise click.UsageError("shifted_power takes two parameters: q,c")
        generator = shifted_power_generator(values[0], values[1])
    if generator is None:
        raise click.UsageError(f"unknown generator {spec!r} (see 'meankit catalog')")
    return generator.restricted(domain) if domain is not None else generator


def resolve_kernel(spec: str, domain: IntervalDomain | None = None) -> Kernel2:
    """Kernel spec: sign_dev | diff_gen:GEN | ratio_dev:GEN | expr:TEXT | GEN.

    A bare generator spec names its difference kernel diff_gen(GEN).
    """
    if spec.startswith("expr:"):
        dom = domain or positive_reals()
        return kernel_from_expression(spec[5:], dom, dom)
    name, _, params = spec.partition(":")
    if name == "sign_dev":
        return sign_kernel()
    if name == "diff_gen":
        kernel = difference_kernel(resolve_generator(params))
        return kernel.with_domains(domain) if domain is not None else kernel
    if name == "ratio_dev":
        return ratio_kernel(resolve_generator(params))
    kernel = difference_kernel(resolve_generator(spec))
    return kernel.with_domains(domain) if domain is not None else kernel


def _emit(doc: dict[str, Any], human_lines: list[str], output_format: str) -> None:
    if output_format == "structured":
        click.echo(json.dumps(doc, indent=2))
    else:
        for line in human_lines:
            click.echo(line)


def _limit_table_lines(est: LimitEstimate) -> list[str]:
    lines = [f"{'t':>24}  {'value':>24}"]
    for t, v in est.values:
        lines.append(f"{t!r:>24}  {v!r:>24}")
    lines.append(
        f"tail_min={est.tail_min!r} tail_max={est.tail_max!r} "
        f"converged={est.converged} window={est.window} tol={est.tol!r}"
    )
    return lines


def _limit_doc(est: LimitEstimate) -> dict[str, Any]:
    # Failed evaluations are NaN internally; emit strict-JSON null instead.
    return {
        "table": [[t, v if math.isfinite(v) else None] for t, v in est.values],
        "tail_min": est.tail_min,
        "tail_max": est.tail_max,
        "estimate": est.estimate,
        "converged": est.converged,
        "window": est.window,
        "tol": est.tol,
    }


def _write_csv(est: LimitEstimate, path: str) -> None:
    rows = ["t,value"] + [f"{t!r},{v!r}" for t, v in est.values]
    text = "\n".join(rows) + "\n"
    if path == "-":
        click.echo(text, nl=False)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# --- command group ----------------------------------------------------------------------


@click.group()
def cli() -> None:
    """Weighted means, scaling homogenizations, and verification suites."""


@cli.group()
def compute() -> None:
    """Evaluate a mean on an explicit sample."""


@compute.command("mean")
@click.option("--kind", type=click.Choice(["power", "qa", "semidev", "deviation"]), required=True)
@click.option("--p", "exponent", default=None, help="Power exponent (accepts inf / -inf).")
@click.option("--generator", default=None, help="Generator spec for --kind qa.")
@click.option("--kernel", default=None, help="Kernel spec for --kind semidev/deviation.")
@click.option("--x", "entries_text", required=True, help="Comma-separated entries.")
@click.option("--w", "weights_text", required=True, help="Comma-separated weights.")
@click.option(
    "--semidev-kind",
    type=click.Choice([k.value for k in MeanKind]),
    default=MeanKind.LOWER_WEAK.value,
)
@click.option("--domain", "domain_text", default=None, help="lo,hi (open interval).")
@click.option("--grid", default=1024, show_default=True, help="Sign-scan grid size.")
@click.option("--refine-tol", default=1e-12, show_default=True)
@click.option("--format", "output_format", type=click.Choice(["human", "structured"]), default="human")
def compute_mean(
    kind, exponent, generator, kernel, entries_text, weights_text,
    semidev_kind, domain_text, grid, refine_tol, output_format,
):
    """Compute one weighted mean value."""
    entries = _parse_vector(entries_text, "--x")
    weights = _parse_vector(weights_text, "--w")
    domain = _parse_domain(domain_text)
    cfg = SemidevMeanConfig(grid_size=grid, refine_tol=refine_tol)
    doc: dict[str, Any] = {"command": "compute-mean", "kind": kind}
    if kind == "power":
        if exponent is None:
            raise click.UsageError("--kind power requires --p")
        p = _parse_float(exponent, "--p")
        sample = make_weighted_sample(entries, weights, domain)
        value = power_mean(sample, p)
        doc.update({"p": p})
        formula = MEAN_FORMULAS["power"]
    elif kind == "qa":
        if generator is None:
            raise click.UsageError("--kind qa requires --generator")
        gen = resolve_generator(generator, domain)
        sample = make_weighted_sample(entries, weights, gen.domain)
        value = quasiarithmetic_mean(sample, gen)
        doc.update({"generator": gen.name})
        formula = MEAN_FORMULAS["qa"]
    elif kind == "semidev":
        if kernel is None:
            raise click.UsageError("--kind semidev requires --kernel")
        kern = resolve_kernel(kernel, _parse_domain(domain_text) if domain_text else None)
        sample = make_weighted_sample(entries, weights, kern.domain_x)
        mean_kind = MeanKind.from_label(semidev_kind)
        value = semideviation_mean(kern, sample, mean_kind, cfg)
        doc.update({"kernel": kern.name, "semidev_kind": semidev_kind})
        formula = MEAN_FORMULAS[semidev_kind]
    else:
        if kernel is None:
            raise click.UsageError("--kind deviation requires --kernel")
        kern = resolve_kernel(kernel, _parse_domain(domain_text) if domain_text else None)
        sample = make_weighted_sample(entries, weights, kern.domain_x)
        value = deviation_mean(kern, sample, cfg)
        doc.update({"kernel": kern.name})
        formula = MEAN_FORMULAS["deviation"]
    doc.update({"entries": entries, "weights": weights, "value": value})
    _emit(doc, [f"# {formula}", repr(value)], output_format)


@cli.command()
@click.option("--target", type=click.Choice(["qa", "mean", "kernel"]), required=True)
@click.option("--method", type=click.Choice(["local", "envelope"]), default="local", show_default=True)
@click.option("--mean", "mean_kind", type=click.Choice(["power", "qa", "semidev", "deviation"]), default=None)
@click.option("--generator", default=None)
@click.option("--kernel", default=None)
@click.option("--p", "exponent", default=None)
@click.option("--semidev-kind", type=click.Choice([k.value for k in MeanKind]), default=MeanKind.LOWER_WEAK.value)
@click.option("--x", "entries_text", default=None)
@click.option("--w", "weights_text", default=None)
@click.option("--ratio", default=None, help="Argument r of the kernel scale profile.")
@click.option("--domain", "domain_text", default=None)
@click.option("--tol", default=1e-6, show_default=True, help="Tail-window tolerance.")
@click.option("--csv", "csv_path", default=None, help="Write the t,value table (use - for stdout).")
@click.option("--format", "output_format", type=click.Choice(["human", "structured"]), default="human")
def homogenize(
    target, method, mean_kind, generator, kernel, exponent, semidev_kind,
    entries_text, weights_text, ratio, domain_text, tol, csv_path, output_format,
):
    """Estimate scaling limits: generator order, mean homogenization, or
    kernel scale profile."""
    doc: dict[str, Any] = {"command": "homogenize", "target": target}
    if target == "qa":
        if generator is None:
            raise click.UsageError("--target qa requires --generator")
        gen = resolve_generator(generator, _parse_domain(domain_text))
        est = qa_local_homogenization(gen, tol=tol)
        order = common_power_order(est)
        doc.update({"generator": gen.name, **_limit_doc(est), "power_order": order})
        lines = [f"# local power order of {gen.name} at 0+"] + _limit_table_lines(est)
        lines.append(f"power_order={order!r}" if order is not None else "power_order=none (tails disagree)")
        _emit(doc, lines, output_format)
        if csv_path:
            _write_csv(est, csv_path)
        return

    if target == "kernel":
        if kernel is None or ratio is None:
            raise click.UsageError("--target kernel requires --kernel and --ratio")
        kern = resolve_kernel(kernel, _parse_domain(domain_text) if domain_text else None)
        r = _parse_float(ratio, "--ratio")
        est = kernel_homogenization(kern, r, tol=tol)
        doc.update({"kernel": kern.name, "ratio": r, **_limit_doc(est)})
        lines = [f"# scale profile of normalized {kern.name} at ratio {r!r}"] + _limit_table_lines(est)
        _emit(doc, lines, output_format)
        if csv_path:
            _write_csv(est, csv_path)
        return

    if entries_text is None or weights_text is None or mean_kind is None:
        raise click.UsageError("--target mean requires --mean, --x and --w")
    entries = _parse_vector(entries_text, "--x")
    weights = _parse_vector(weights_text, "--w")
    if mean_kind == "power":
        if exponent is None:
            raise click.UsageError("--mean power requires --p")
        handle = power_handle(_parse_float(exponent, "--p"), _parse_domain(domain_text))
    elif mean_kind == "qa":
        if generator is None:
            raise click.UsageError("--mean qa requires --generator")
        handle = quasiarithmetic_handle(resolve_generator(generator, _parse_domain(domain_text)))
    elif mean_kind == "semidev":
        if kernel is None:
            raise click.UsageError("--mean semidev requires --kernel")
        kern = resolve_kernel(kernel, _parse_domain(domain_text) if domain_text else None)
        handle = semideviation_handle(kern, MeanKind.from_label(semidev_kind))
    else:
        if kernel is None:
            raise click.UsageError("--mean deviation requires --kernel")
        kern = resolve_kernel(kernel, _parse_domain(domain_text) if domain_text else None)
        handle = deviation_handle(kern)
    sample = make_weighted_sample(entries, weights, positive_reals())
    doc.update({"mean": handle.name, "entries": entries, "weights": weights, "method": method})
    if method == "envelope":
        domain_sample = make_weighted_sample(entries, weights, handle.domain)
        lower, upper = envelope_pair(handle, domain_sample)
        doc.update({"lower": lower, "upper": upper})
        _emit(
            doc,
            [f"# homogeneous envelopes of {handle.name}", f"lower={lower!r}", f"upper={upper!r}"],
            output_format,
        )
        return
    est = local_homogenization(handle, sample, tol=tol)
    doc.update(_limit_doc(est))
    lines = [f"# local homogenization of {handle.name}: M(t x, w)/t for t -> 0+"]
    lines += _limit_table_lines(est)
    lines.append(f"estimate={est.estimate!r}")
    _emit(doc, lines, output_format)
    if csv_path:
        _write_csv(est, csv_path)


SUITES = ("sandwich", "lemma-lim", "comparison", "jensen", "tei", "cei", "minkowski", "hoelder", "homi")


@cli.command()
@click.option("--suite", type=click.Choice(SUITES), required=True)
@click.option("--kernel", default=None, help="Primary kernel spec (generator spec for presets).")
@click.option("--kernel2", default=None, help="Second kernel (comparison / homi).")
@click.option("--kernel3", default=None, help="Third kernel (homi).")
@click.option("--op", "operation_text", default=None, help="expr:TEXT operation in x, y (homi).")
@click.option("--seed", default=0, show_default=True)
@click.option("--samples", default=100, show_default=True)
@click.option("--grid", default=10, show_default=True)
@click.option("--x", "point_text", default=None, help="Point pair x,y for lemma-lim.")
@click.option("--n-range", default="1,6", show_default=True)
@click.option("--entry-range", default=None)
@click.option("--weight-range", default="0.1,3", show_default=True)
@click.option("--domain", "domain_text", default=None)
@click.option("--monotone/--no-monotone", default=True, show_default=True, help="homi: probe and use the monotone form.")
@click.option("--config", "config_path", default=None, help="JSON file mirroring these options.")
@click.option("--format", "output_format", type=click.Choice(["human", "structured"]), default="human")
@click.pass_context
def verify(
    ctx, suite, kernel, kernel2, kernel3, operation_text, seed, samples, grid,
    point_text, n_range, entry_range, weight_range, domain_text, monotone,
    config_path, output_format,
):
    """Run one verification suite; exit 0 on pass, 1 on fail/inconclusive."""
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
        merged = {}
        for key, value in config.items():
            name = key.replace("-", "_")
            if name not in ctx.params:
                raise click.UsageError(f"config file: unknown key {key!r}")
            source = ctx.get_parameter_source(name)
            if source is not None and source.name == "DEFAULT":
                merged[name] = value
        suite = merged.get("suite", suite)
        kernel = merged.get("kernel", kernel)
        kernel2 = merged.get("kernel2", kernel2)
        kernel3 = merged.get("kernel3", kernel3)
        operation_text = merged.get("op", merged.get("operation_text", operation_text))
        seed = int(merged.get("seed", seed))
        samples = int(merged.get("samples", samples))
        grid = int(merged.get("grid", grid))
        point_text = merged.get("x", merged.get("point_text", point_text))
        n_range = merged.get("n_range", n_range)
        entry_range = merged.get("entry_range", entry_range)
        weight_range = merged.get("weight_range", weight_range)
        domain_text = merged.get("domain", domain_text)
        monotone = bool(merged.get("monotone", monotone))
        output_format = merged.get("format", output_format)

    n_lo, n_hi = (int(v) for v in _parse_vector(n_range, "--n-range"))
    plan = SamplePlan(
        seed=seed,
        n_samples=samples,
        n_range=(n_lo, n_hi),
        entry_range=_parse_range(entry_range, "--entry-range"),
        weight_range=_parse_range(weight_range, "--weight-range") or (0.1, 3.0),
    )
    domain = _parse_domain(domain_text) if domain_text else None

    if suite in ("minkowski", "hoelder"):
        generator = resolve_generator(kernel) if kernel else None
        factor_range = _parse_range(entry_range, "--entry-range") or (0.5, 4.0)
        preset = (minkowski_preset if suite == "minkowski" else hoelder_preset)(
            generator, factor_range
        )
        inner_lo, inner_hi = factor_range
        pad = 0.05 * (inner_hi - inner_lo)
        plan_inner = SamplePlan(
            seed=seed, n_samples=samples, n_range=(n_lo, n_hi),
            entry_range=(inner_lo + pad, inner_hi - pad),
            weight_range=plan.weight_range,
        )
        report = verify_homi(
            preset["kernel_result"], preset["kernel_first"], preset["kernel_second"],
            preset["operation"], plan_inner, grid=grid,
            monotone_mode=preset["monotone_mode"], suite_label=suite,
        )
    elif suite == "homi":
        if not (kernel and kernel2 and kernel3 and operation_text):
            raise click.UsageError("--suite homi needs --kernel, --kernel2, --kernel3 and --op")
        op_spec = operation_text if operation_text.startswith("expr:") else f"expr:{operation_text}"
        kern_i = resolve_kernel(kernel, domain)
        kern_j = resolve_kernel(kernel2, domain)
        kern_k = resolve_kernel(kernel3, domain)
        operation = kernel_from_expression(op_spec[5:], kern_j.domain_x, kern_k.domain_x, name="operation")
        report = verify_homi(kern_i, kern_j, kern_k, operation, plan, grid=grid, monotone_mode=monotone)
    elif suite == "lemma-lim":
        if kernel is None or point_text is None:
            raise click.UsageError("--suite lemma-lim needs --kernel and --x x,y")
        points = _parse_vector(point_text, "--x")
        if len(points) != 2:
            raise click.UsageError("--x must give exactly two points for lemma-lim")
        report = verify_lemma_lim(resolve_kernel(kernel, domain), points[0], points[1])
    elif suite == "comparison":
        if kernel is None or kernel2 is None:
            raise click.UsageError("--suite comparison needs --kernel and --kernel2")
        report = verify_comparison(
            resolve_kernel(kernel, domain), resolve_kernel(kernel2, domain), plan, grid=max(grid, 12)
        )
    else:
        if kernel is None:
            raise click.UsageError(f"--suite {suite} needs --kernel")
        kern = resolve_kernel(kernel, domain)
        if suite == "sandwich":
            report = verify_sandwich(kern, plan)
        elif suite == "jensen":
            report = verify_jensen(kern, plan, grid=max(grid, 12))
        elif suite == "tei":
            report = verify_tei(kern, plan)
        else:
            report = verify_cei(kern, plan)

    doc = {"command": "verify", "suite": suite, "seed": seed, "samples": samples,
           "report": report.to_dict()}
    _emit(doc, _report_lines(report), output_format)
    return 0 if report.overall == "pass" else 1


def _report_lines(report: Report) -> list[str]:
    lines = [f"suite {report.theorem_id}: {report.overall.upper()}"]
    for cond in report.conditions:
        status = "ok" if cond.holds else "FAIL"
        lines.append(f"  [{status}] {cond.name} ({cond.checked} checks)")
        if cond.note:
            lines.append(f"      {cond.note}")
        if cond.witness is not None:
            lines.append(f"      witness: {json.dumps(cond.witness)}")
    return lines


@cli.command()
def catalog() -> None:
    """List built-in generators and kernels with derivative availability."""
    rows = [
        ("generator", "power:P", "x^P (P=0: log) on (0, inf)", "analytic f', f''"),
        ("generator", "log", "log x on (0, inf)", "analytic f', f''"),
        ("generator", "exp", "exp x on (-inf, inf)", "analytic f', f''"),
        ("generator", "cosh", "cosh x on (0, inf)", "analytic f', f''"),
        ("generator", "shifted_power:Q,C", "(x+C)^Q on (-C, inf)", "analytic f', f''"),
        ("generator", "expr:TEXT", "expression in x", "numeric fallback"),
        ("kernel", "sign_dev", "sign(x - y): weighted medians", "none (not normalizable)"),
        ("kernel", "diff_gen:GEN", "GEN(x) - GEN(y)", "analytic partials when GEN has them"),
        ("kernel", "ratio_dev:GEN", "GEN(x / y) on (0, inf)^2", "analytic partials when GEN has them"),
        ("kernel", "expr:TEXT", "expression in x, y", "numeric fallback"),
    ]
    width = max(len(r[1]) for r in rows)
    for role, name, what, derivs in rows:
        click.echo(f"{role:<9}  {name:<{width}}  {what:<34}  {derivs}")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        result = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.exceptions.Abort:
        return 2
    except MeanKitError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 3
    return int(result) if isinstance(result, int) else 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
