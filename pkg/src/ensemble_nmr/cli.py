"""Scenario runner: ``ensemble-nmr <command> [--key value ...]``.

Parameters come from ``--key value`` pairs or a flat ``key = value`` config
file (``--config``); command-line pairs win. Dimensioned values need a unit
suffix. Output is CSV (default), JSON or a text table, always with a
provenance block echoing the inputs and the constants-table version.

Exit codes: 0 success, 2 parse error, 3 domain error, 4 convergence error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import automaton as ca
from . import bloch, decoherence, discrete_field, dnp, donor, readout
from . import constants as C
from .ensemble import QUOTED_LMAX, max_qubits_for_threshold
from .errors import ConvergenceError, DomainError, ParseError
from .units import SI_UNIT, parse_config, parse_quantity

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4


@dataclass
class Report:
    columns: list                 # header names with units
    rows: list                    # lists of values, one per column
    notes: list = field(default_factory=list)
    text: str | None = None       # optional human-readable body for table output


# Parameter schemas: key -> (kind, default). Defaults are strings parsed like input.
SCHEMAS = {
    "levels": {"species": ("str", "P31"), "B": ("field", "1T")},
    "snr": {
        "mode": ("str", "solid"), "species": ("str", "P31"), "B": ("field", "1T"),
        "Q": ("number", None), "T": ("temperature", None), "N": ("number", None),
        "V_s": ("volume", "1cm3"), "bandwidth": ("frequency", "1Hz"),
        "R": ("resistance", "50ohm"), "L": ("int", None), "epsilon": ("number", None),
        "l_x": ("length", "20nm"), "l_y": ("length", "50nm"), "d": ("length", "20nm"),
        "delta": ("length", "0.1cm"), "N0": ("int", "100"), "target": ("number", "1"),
    },
    "bloch": {
        "species": ("str", "P31"), "B": ("field", "1T"), "T_perp": ("time", None),
        "T_par": ("time", None), "b_eff": ("field", None), "settle": ("number", "8"),
        "scale": ("number", "2000"),
    },
    "dnp": {
        "model": ("str", "reduced"), "species": ("str", "P31"), "W_e": ("rate", "1000s-1"),
        "T_B": ("time", "1000s"), "T_A": ("time", "36000s"), "duration": ("time", "5000s"),
        "samples": ("int", "11"), "P_S0": ("number", "-1"), "P_I0": ("number", "0"),
        "B": ("field", "1T"), "T": ("temperature", "0.1K"),
    },
    "budget": {
        "tau_D": ("time", "1s"), "C_S": ("concentration", "1e15cm-3"),
        "C_N": ("concentration", "2e18cm-3"), "nu_J": ("frequency", "100kHz"),
        "l_x": ("length", "20nm"), "L": ("int", "1000"),
        "abundance": ("number", str(C.NATURAL_29SI_PERCENT)),
    },
    "appendix": {
        "species": ("str", "P31"), "n": ("int", "20"), "p_N0": ("int", "40"),
        "X_over_D": ("number", "10"), "X_over_delta": ("number", "100"),
        "X": ("length", "100um"), "Q": ("number", "100"), "K": ("number", "10"),
        "B": ("field", "1T"), "map_points": ("int", "0"), "map_z": ("length", None),
    },
    "ca": {
        "length": ("int", "12"), "ports": ("str", "0"), "port": ("int", "0"),
        "bit": ("int", "1"), "B": ("field", "1T"), "J_ex": ("energy", "6.5e-23J"),
        "boundary": ("str", "fixed"),
    },
}


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9e}"
    return str(v)


def _species(params):
    name = params["species"]
    if name not in donor.SPECIES:
        raise DomainError(f"unknown species {name!r} (known: {', '.join(donor.SPECIES)})")
    return donor.SPECIES[name]


# ---- commands -------------------------------------------------------------

def cmd_levels(p):
    sp = _species(p)
    ts = donor.transition_frequencies(sp, p["B"])
    rows = []
    for name, w in ts.as_dict().items():
        rows.append([name, w, w / C.TWO_PI / C.MHz, ts.allowed[name]])
    gain = donor.gain_factor(sp, p["B"])
    notes = [f"1+eta = {1 + gain.eta:.6g} (weak-field window: {gain.in_window})"]
    text = "\n".join(f"{r[0]:<3} {r[2]:>12.6g} MHz  {'allowed' if r[3] else 'forbidden'}"
                     for r in rows)
    return Report(["transition", "omega[rad/s]", "frequency[MHz]", "allowed[1]"], rows,
                  notes, text)


def summary_levels(p):
    sp = _species(p)
    ts = donor.transition_frequencies(sp, p["B"]).as_dict()
    cols = [f"f_{k}[MHz]" for k in ts] + ["gain_1_plus_eta[1]"]
    vals = [w / C.TWO_PI / C.MHz for w in ts.values()]
    vals.append(1 + donor.gain_factor(sp, p["B"]).eta)
    return Report(cols, [vals])


def cmd_snr(p):
    sp = _species(p)
    w = donor.transition_frequencies(sp, p["B"]).omega_A_plus
    if p["mode"] == "liquid":
        q = p["Q"] if p["Q"] is not None else 100.0
        T = p["T"] if p["T"] is not None else 300.0
        N = p["N"] if p["N"] is not None else 1e16
        L = p["L"] if p["L"] is not None else 2
        circuit = readout.CoilCircuit.from_resonance(q, p["R"], p["V_s"], w, p["bandwidth"])
        est = readout.signal_to_noise_liquid(sp, circuit, N, L, T, w, p["epsilon"])
        notes = [f"max L with L 2^-L > 1e-3: {max_qubits_for_threshold(1e-3)} "
                 f"(quoted {QUOTED_LMAX})"]
        return Report(["N[1]", "L[1]", "epsilon[1]", "snr_exact[1]", "snr_shorthand[1]"],
                      [[N, L, est.epsilon, est.exact, est.shorthand]], notes)
    if p["mode"] != "solid":
        raise DomainError(f"unknown snr mode {p['mode']!r} (liquid, solid)")
    q = p["Q"] if p["Q"] is not None else readout.DESIGN_Q_SOLID
    T = p["T"] if p["T"] is not None else readout.DESIGN_T_SOLID
    L = p["L"] if p["L"] is not None else 1000
    N = p["N"] if p["N"] is not None else 1e5
    geom = readout.RegisterGeometry(p["l_x"], p["l_y"], p["d"], p["delta"], L, p["N0"])
    est = readout.signal_to_noise_solid(sp, geom, q, T, w, N=N, bandwidth=p["bandwidth"])
    need = readout.required_ensemble_size(p["target"], sp, geom, q, T, w)
    lay = readout.block_layout(need, p["N0"], L, p["l_x"], p["l_y"])
    return Report(
        ["N[1]", "snr_shorthand[1]", "snr_liquid_form[1]", "snr_exact[1]",
         "N_required[1]", "blocks_n[1]", "blocks_p[1]", "side_x[m]", "side_y[m]"],
        [[N, est.shorthand, est.liquid_form, est.exact, need, lay.n, lay.p,
          lay.side_x, lay.side_y]])


BLOCH_COLUMNS = ("omega_A[rad/s]", "T_perp[s]", "T_par[s]", "b_eff[T]",
                 "Mx_amplitude[Mz0]", "Mx_rotating_frame[Mz0]")


def cmd_bloch(p):
    sp = _species(p)
    w = donor.transition_frequencies(sp, p["B"]).omega_A_plus
    T_perp = p["T_perp"] if p["T_perp"] is not None else p["scale"] / w
    T_par = p["T_par"] if p["T_par"] is not None else T_perp
    relax = bloch.RelaxationTimes(T_perp_I=T_perp, T_par_I=T_par)
    b = p["b_eff"] if p["b_eff"] is not None else bloch.optimal_rf_amplitude(sp, relax)
    amp = bloch.steady_state_run(sp, b, w, relax, settle=p["settle"])
    rwa = bloch.rotating_frame_steady_state(1.0, sp.gamma_I, b, T_perp, T_par)
    return Report(list(BLOCH_COLUMNS), [[w, T_perp, T_par, b, amp, rwa]])


def cmd_dnp(p):
    if p["samples"] < 1:
        raise DomainError("samples must be >= 1")
    times = np.linspace(0.0, p["duration"], p["samples"])
    if p["model"] == "reduced":
        traj = dnp.polarization_closed_form((p["P_S0"], p["P_I0"]), p["W_e"], p["T_B"],
                                            p["T_A"], times)
        ss = dnp.polarization_steady_state(p["W_e"], p["T_B"], p["T_A"])
        rows = [[t, a, b] for t, a, b in zip(traj.t, traj.P_S, traj.P_I)]
        return Report(["t[s]", "P_S[1]", "P_I[1]"], rows,
                      [f"steady state P_S = {ss[0]:.9e}, P_I = {ss[1]:.9e}"])
    if p["model"] != "full":
        raise DomainError(f"unknown dnp model {p['model']!r} (reduced, full)")
    sp = _species(p)
    relax = bloch.RelaxationTimes(T_par_A=p["T_A"], T_par_B=p["T_B"], T_par_C=p["T_B"],
                                  T_par_D=dnp.DESIGN_RELAXATION.T_par_D)
    ts = donor.transition_frequencies(sp, p["B"])
    R = dnp.rate_matrix_full(relax, p["W_e"], p["T"], ts)
    p0 = dnp.boltzmann_populations(sp, p["B"], p["T"])
    traj = dnp.integrate_populations(p0, R, times)
    P_S, P_I = traj.polarizations()
    rows = [[t, *pop, ps, pi] for t, pop, ps, pi in zip(traj.t, traj.p, P_S, P_I)]
    return Report(["t[s]", "p11[1]", "p10[1]", "p1m1[1]", "p00[1]", "P_S[1]", "P_I[1]"], rows)


def cmd_budget(p):
    imp = decoherence.ImpurityBudget(p["tau_D"], p["C_S"], p["C_N"], p["abundance"])
    geom = type("Geometry", (), {"l_x": p["l_x"], "L": p["L"]})()
    rep = decoherence.error_budget_report(geom, imp, p["nu_J"])
    cs = decoherence.paramagnetic_limit(p["tau_D"])
    cn = decoherence.allowed_nuclear_impurity(p["tau_D"])
    q = decoherence.QUOTED_ESTIMATES
    cols = ["C_S_limit[cm^-3]", "C_N_limit[cm^-3]", "C_N_limit[%]",
            "linewidth[rad/s]", "nuclear_rate[1/s]", "secular_shift[Hz]",
            "coherence_length[m]", "coherence_length[l_x]", "gate_error[1]",
            "magic_angle[deg]", "passed[1]"]
    vals = [cs / C.per_cm3, cn.C_N / C.per_cm3, cn.percent,
            rep.rows[0].value, rep.rows[1].value, rep.rows[2].value,
            rep.rows[3].value, rep.rows[3].value / p["l_x"], rep.rows[4].value,
            math.degrees(decoherence.magic_angle()), rep.passed]
    notes = [f"quoted {k}: {v}" for k, v in q.items()] + rep.notes
    text = (f"C_S limit   {cs / C.per_cm3:.4e} cm^-3   (quoted {q['C_S']})\n"
            f"C_N limit   {cn.C_N / C.per_cm3:.4e} cm^-3   (quoted {q['C_N']})\n"
            f"C_N limit   {cn.percent:.4e} %       (quoted {q['C_N_percent']})\n\n"
            + rep.to_table(notes=False))
    return Report(cols, [vals], notes, text)


def cmd_appendix(p):
    sp = _species(p)
    w = donor.transition_frequencies(sp, p["B"]).omega_A_plus
    lay = discrete_field.SpinArrayLayout.from_ratios(p["n"], p["p_N0"], p["X_over_D"],
                                                     p["X_over_delta"], p["X"])
    brute = discrete_field.brute_force_signal(lay, sp, p["Q"], p["K"], w)
    ka = p["K"] * lay.area
    ana = discrete_field.analytic_signal(lay, sp, p["Q"], ka, w)
    mac = discrete_field.macroscopic_signal(lay, sp, p["Q"], ka, w)
    G = discrete_field.geometry_factor(lay.X, lay.D, lay.delta)
    if p["map_points"] > 0:
        z = p["map_z"] if p["map_z"] is not None else lay.delta / 4.0
        xs = np.linspace(-lay.X / 2, lay.X / 2, p["map_points"])
        rows = [[x, 0.0, z, discrete_field.peak_field_at(lay, sp, (x, 0.0, z))] for x in xs]
        return Report(["x[m]", "y[m]", "z[m]", "B_x[T]"], rows)
    return Report(["N[1]", "geometry_factor[1]", "brute_force[V]", "analytic[V]",
                   "uniform[V]", "brute_over_analytic[1]", "quadrature_change[1]"],
                  [[lay.N, G, brute.voltage, ana, mac, brute.voltage / ana,
                    brute.rel_change]])


def _parse_ports(text):
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"ports must be comma-separated integers, got {text!r}") from None


def cmd_ca(p):
    cpl = ca.ChainCouplings(A=donor.P31.hyperfine_A, J_ex=p["J_ex"], B=p["B"])
    chain = ca.ground_state(p["length"], _parse_ports(p["ports"]), p["boundary"])
    sched = ca.port_io_sequence(chain, p["port"], p["bit"], cpl)
    written = ca.execute_schedule(chain, sched.pulses, cpl)
    bit, _, _ = ca.port_read(written, p["port"], cpl)
    text = ("before:\n" + ca.chain_to_text(chain) + "after:\n" + ca.chain_to_text(written)
            + "schedule:\n" + ca.schedule_to_text(sched))
    return Report(["length[1]", "port[1]", "target[1]", "bit_written[1]", "bit_read[1]",
                   "pulses[1]", "T_NS[K]", "I_n[J]", "splitting[Hz]"],
                  [[p["length"], p["port"], sched.target, p["bit"], bit, len(sched),
                    ca.neel_temperature(p["J_ex"]), cpl.I_n, cpl.I_n / C.h]],
                  [], text)


COMMANDS = {
    "levels": cmd_levels, "snr": cmd_snr, "bloch": cmd_bloch, "dnp": cmd_dnp,
    "budget": cmd_budget, "appendix": cmd_appendix, "ca": cmd_ca,
}
SWEEP_FORMS = {"levels": summary_levels}


# ---- parameters -----------------------------------------------------------

def _normalise(key):
    return key.lstrip("-").replace("-", "_")


def resolve_parameters(command, pairs, config_text=None):
    """Merge config-file and command-line pairs into parsed SI values.

    Returns (params, echo) where echo maps key -> raw text for provenance.
    """
    schema = SCHEMAS[command]
    raw, where = {}, {}
    if config_text is not None:
        for key, value, line, kcol, vcol in parse_config(config_text):
            k = _normalise(key)
            if k not in schema:
                raise ParseError(f"unknown key {key!r} for {command}", line, kcol)
            raw[k], where[k] = value, (line, vcol)
    for key, value in pairs:
        k = _normalise(key)
        if k not in schema:
            raise ParseError(f"unknown option --{key} for {command}")
        raw[k], where[k] = value, (None, None)
    params, echo = {}, {}
    for k, (kind, default) in schema.items():
        text = raw.get(k, default)
        if text is None:
            params[k] = None
            continue
        line, col = where.get(k, (None, None))
        try:
            params[k] = parse_quantity(text, kind, line, col)
        except ParseError as e:
            if line is None and k in raw:
                raise ParseError(f"--{k}: {e}") from None
            raise
        echo[k] = text
    return params, echo


def _split_pairs(tokens):
    pairs, i = [], 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise ParseError(f"expected --key, got {tok!r} (argument {i + 1})")
        if "=" in tok:
            k, v = tok[2:].split("=", 1)
            pairs.append((k, v))
            i += 1
            continue
        if i + 1 >= len(tokens):
            raise ParseError(f"missing value for {tok} (argument {i + 1})")
        pairs.append((tok[2:], tokens[i + 1]))
        i += 2
    return pairs


def sweep_values(start, stop, steps, spacing):
    if steps < 0:
        raise ParseError("steps must be >= 0")
    if stop < start:
        raise ParseError(f"reversed sweep range: from {start} > to {stop}")
    if steps == 0:
        return []
    if steps == 1:
        return [start]
    if spacing == "log":
        if start <= 0:
            raise ParseError("log spacing needs a positive range")
        return list(np.geomspace(start, stop, steps))
    if spacing != "lin":
        raise ParseError(f"unknown spacing {spacing!r} (lin, log)")
    return list(np.linspace(start, stop, steps))


def _axis_header(kind, key):
    if kind in SI_UNIT:
        return f"{key}[{SI_UNIT[kind]}]"
    return f"{key}[1]"


def run_sweep(command, params, echo, axis, start_text, stop_text, steps, spacing):
    schema = SCHEMAS[command]
    if axis not in schema:
        raise ParseError(f"unknown sweep axis {axis!r} for {command}")
    kind = schema[axis][0]
    if kind == "str":
        raise ParseError(f"sweep axis {axis!r} is not numeric")
    start = parse_quantity(start_text, kind)
    stop = parse_quantity(stop_text, kind)
    values = sweep_values(start, stop, steps, spacing)
    fn = SWEEP_FORMS.get(command, COMMANDS[command])
    columns, rows, points = None, [], []
    for v in values:
        pt = dict(params)
        pt[axis] = int(round(v)) if kind == "int" else float(v)
        points.append(pt[axis])
        rep = fn(pt)
        if len(rep.rows) != 1:
            raise DomainError(f"{command} does not produce a single summary row")
        columns = rep.columns
        rows.append(list(rep.rows[0]))
    if columns is None:
        columns = BLOCH_COLUMNS if command == "bloch" else fn(dict(params)).columns
    columns = list(columns)
    head = _axis_header(kind, axis)
    if head not in columns:
        columns.insert(0, head)
        rows = [[v, *r] for v, r in zip(points, rows)]
    echo = dict(echo, sweep=f"{axis} {start_text}..{stop_text} steps={steps} {spacing}")
    return Report(columns, rows), echo


# ---- output ---------------------------------------------------------------

def provenance(command, echo):
    lines = [f"command={command}", f"constants_version={C.CONSTANTS_VERSION}"]
    lines += [f"input {k}={v}" for k, v in sorted(echo.items())]
    return lines


def render(report: Report, fmt, command, echo):
    prov = provenance(command, echo)
    if fmt == "json":
        doc = {
            "provenance": {"command": command, "constants_version": C.CONSTANTS_VERSION,
                           "inputs": dict(sorted(echo.items()))},
            "columns": report.columns,
            "rows": [[_json_value(v) for v in r] for r in report.rows],
            "notes": report.notes,
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "table":
        out = []
        if report.text is not None:
            out.append(report.text.rstrip("\n"))
        else:
            widths = [max(len(c), 16) for c in report.columns]
            out.append("  ".join(c.rjust(w) for c, w in zip(report.columns, widths)))
            for r in report.rows:
                out.append("  ".join(_table_cell(v).rjust(w) for v, w in zip(r, widths)))
        out += [f"note: {n}" for n in report.notes]
        out += [f"# {line}" for line in prov]
        return "\n".join(out) + "\n"
    buf = io.StringIO()
    for line in prov:
        buf.write(f"# {line}\n")
    for n in report.notes:
        buf.write(f"# note: {n}\n")
    w = csv.writer(buf, lineterminator="\n")
    if report.columns:
        w.writerow(report.columns)
    for r in report.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.9e}")
    return v


def _table_cell(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def build_parser():
    ap = argparse.ArgumentParser(prog="ensemble-nmr", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="flat key = value parameter file")
    ap.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    ap.add_argument("--output", help="output path (default: stdout)")
    ap.add_argument("--sweep", metavar="KEY", help="parameter to sweep")
    ap.add_argument("--from", dest="start", metavar="VALUE")
    ap.add_argument("--to", dest="stop", metavar="VALUE")
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--spacing", choices=("lin", "log"), default="lin")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        ns, rest = ap.parse_known_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    try:
        config = None
        if ns.config:
            with open(ns.config, encoding="utf-8") as fh:
                config = fh.read()
        params, echo = resolve_parameters(ns.command, _split_pairs(rest), config)
        if ns.sweep:
            if ns.start is None or ns.stop is None:
                raise ParseError("--sweep needs --from and --to")
            report, echo = run_sweep(ns.command, params, echo, _normalise(ns.sweep),
                                     ns.start, ns.stop, ns.steps, ns.spacing)
        else:
            report = COMMANDS[ns.command](params)
        text = render(report, ns.format, ns.command, echo)
    except (ParseError, OSError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as e:
        print(f"convergence error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    if ns.output:
        with open(ns.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
