"""``ndlt`` command-line interface.

Exit codes: 0 success, 2 malformed container, 3 corrupt payload,
4 numerical precondition failure, 64 usage error.
"""
import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .convolution import convolve, rotate
from .exceptions import (ContainerCorruptError, ContainerParseError, DegenerateGeometryError,
                         PreconditionError)
from .filterbank import identity_residuals, sample_profiles
from .harmonics import Rotation, analysis, synthesis
from .harness import ablation_table, molecule_potential_signal, sigma_sweep
from .io import read_container, write_container
from .layers import ShrinkageConfig, shrink, spectral_pool
from .needlet import decompose, fine_scale, reconstruct, verify_tightness
from .quadrature import make_rule
from .signals import GridSignal, Spectrum, block_offset, random_spectrum

EXIT_OK, EXIT_PARSE, EXIT_CORRUPT, EXIT_PRECONDITION, EXIT_USAGE = 0, 2, 3, 4, 64
_PRECISION = {"single": np.complex64, "double": np.complex128}
_SPECTRAL = ("s2-spectral", "so3-spectral")


class UsageError(Exception):
    """Invalid command-line usage."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ----------------------------------------------------------------------------
# Output helpers


def _emit(rows, fmt, out=None, title=None):
    """Write a list of flat dicts as text, JSON or CSV to ``out`` (path) or stdout."""
    buf = io.StringIO()
    if fmt == "json":
        json.dump(rows, buf, indent=2)
        buf.write("\n")
    elif fmt == "csv":
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    else:
        if title:
            buf.write(title + "\n")
        for row in rows:
            buf.write("  ".join(f"{k}={_fmt(v)}" for k, v in row.items()) + "\n")
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _dtype(args):
    return _PRECISION[getattr(args, "precision", "double")]


def _read(path, kinds):
    try:
        return read_container(path, kinds)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ----------------------------------------------------------------------------
# Subcommands


def cmd_quadrature(args):
    write_container(make_rule(args.manifold, args.bandwidth), args.out)


def cmd_gen_random(args):
    spec = random_spectrum(args.manifold, args.bandwidth, args.channels, args.decay,
                           rng=args.seed, real=args.real)
    write_container(spec, args.out)


def cmd_gen_harmonic(args):
    l, m = args.l, args.m
    L = l if args.bandwidth is None else args.bandwidth
    if abs(m) > l or L < l or (args.n is not None and abs(args.n) > l):
        raise UsageError("need |m| <= l, |n| <= l and bandwidth >= l")
    manifold = "so3" if args.n is not None else args.manifold
    spec = Spectrum.zeros(manifold, L)
    if manifold == "s2":
        spec.data[0, l * l + l + m] = 1.0
    else:
        n = 0 if args.n is None else args.n
        k = 2 * l + 1
        spec.data[0, block_offset("so3", l) + (l + m) * k + (l + n)] = 1.0
    write_container(spec, args.out)


def _load_atoms(path):
    """Atoms file: one ``charge x y z`` line per atom, or a JSON list of ``[charge, [x, y, z]]``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
        return [(float(z), [float(c) for c in p]) for z, p in data]
    except (json.JSONDecodeError, TypeError, ValueError):
        pass
    atoms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 4:
            raise ContainerParseError(f"{path}:{lineno}: expected 'charge x y z'")
        try:
            z, x, y, w = map(float, parts)
        except ValueError:
            raise ContainerParseError(f"{path}:{lineno}: non-numeric field") from None
        atoms.append((z, [x, y, w]))
    return atoms


def cmd_gen_molecule(args):
    atoms = _load_atoms(args.atoms)
    rule = make_rule("s2", args.bandwidth)
    signal = molecule_potential_signal(atoms, args.center, args.charge, rule)
    write_container(analysis(signal) if args.spectral else signal, args.out)


def cmd_transform(args):
    kinds = {None: ("s2-grid", "so3-grid") + _SPECTRAL, "fwd": ("s2-grid", "so3-grid"), "inv": _SPECTRAL}
    value = _read(args.inp, kinds[args.direction])
    manifold = value.manifold
    if args.manifold is not None and args.manifold != manifold:
        raise UsageError(f"--manifold {args.manifold} does not match the {manifold} input")
    if isinstance(value, GridSignal):
        grid = GridSignal(value.rule, value.samples.astype(_dtype(args)))
        out = analysis(grid, args.bandwidth)
    else:
        spec = value.astype(_dtype(args))
        L = max(spec.bandwidth, 1) if args.bandwidth is None else args.bandwidth
        out = synthesis(spec, make_rule(spec.manifold, L))
    write_container(out, args.out)


def cmd_decompose(args):
    spec = _read(args.inp, _SPECTRAL).astype(_dtype(args))
    J = fine_scale(max(spec.bandwidth, 1))
    j0 = J - 1 if args.j0 is None else args.j0
    write_container(decompose(spec, j0), args.out)


def cmd_reconstruct(args):
    write_container(reconstruct(_read(args.inp, ("needlet",))), args.out)


def cmd_convolve(args):
    f = _read(args.signal, _SPECTRAL).astype(_dtype(args))
    phi = _read(args.filter, _SPECTRAL).astype(_dtype(args))
    write_container(convolve(f, phi, args.normalization), args.out)


def cmd_rotate(args):
    value = _read(args.inp, _SPECTRAL + ("needlet",))
    R = Rotation(args.alpha, args.beta, args.gamma)
    if isinstance(value, Spectrum):
        value = value.astype(_dtype(args))
    write_container(rotate(value, R), args.out)


def cmd_shrink(args):
    coeffs = _read(args.inp, ("needlet",))
    write_container(shrink(coeffs, ShrinkageConfig(args.sigma, args.n)), args.out)


def cmd_pool(args):
    value = _read(args.inp, _SPECTRAL)
    write_container(spectral_pool(value), args.out)


def cmd_filters(args):
    xi, table = sample_profiles(args.points)
    rows = [{"xi": float(x), **{k: float(v[i]) for k, v in table.items()}} for i, x in enumerate(xi)]
    _emit(rows, "csv" if args.format == "text" else args.format, args.out)


def cmd_verify(args):
    fmt = args.format
    if args.check == "partition":
        res = identity_residuals(args.points)
        rows = [{"check": k, "residual": v, "tolerance": 1e-14, "passed": v < 1e-14} for k, v in res.items()]
    elif args.check == "tight-frame":
        rows = []
        for manifold in ("s2", "so3"):
            L = args.bandwidth if manifold == "s2" else min(args.bandwidth, 16)
            for j0 in range(1, fine_scale(L)):
                rep = verify_tightness(L, j0, args.trials, manifold, rng=args.seed)
                worst = max(rep.values())
                rows.append({"manifold": manifold, "bandwidth": L, "j0": j0, **rep,
                             "passed": worst < 1e-12})
    else:
        table = ablation_table(args.bandwidth, args.sigma, args.trials, args.rotations, args.seed)
        rows = [dict(r) for r in table]
    _emit(rows, fmt, args.out, title=f"verify {args.check}")


def cmd_sweep_sigma(args):
    if not 0 < args.lo <= args.hi:
        raise UsageError("need 0 < --from <= --to")
    sigmas = np.geomspace(args.lo, args.hi, args.points)
    f = random_spectrum(args.manifold, args.bandwidth, decay=args.decay, rng=args.seed,
                        real=True, dtype=_dtype(args))
    rows = [{"sigma": s, "error": e, "compression": c}
            for s, e, c in sigma_sweep(f, sigmas, rotations=args.rotations, seed=args.seed)]
    fmt = "csv" if args.format == "text" and args.out else args.format
    _emit(rows, fmt, args.out)


# ----------------------------------------------------------------------------
# Parser


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    p.add_argument("--precision", choices=sorted(_PRECISION), default=argparse.SUPPRESS,
                   help="working precision (default double)")
    p.add_argument("--format", choices=("text", "json", "csv"), default=argparse.SUPPRESS,
                   help="report format (default text)")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="ndlt", description="Needlet transforms on the sphere and rotation group.",
                     parents=[common])
    parser.add_argument("--version", action="version", version=f"ndlt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("quadrature", cmd_quadrature, "write a quadrature rule")
    p.add_argument("--manifold", choices=("s2", "so3"), required=True)
    p.add_argument("--bandwidth", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("gen", None, "generate signals")
    gen = p.add_subparsers(dest="generator", required=True, parser_class=_Parser)
    g = gen.add_parser("random", parents=[common], help="random band-limited spectrum")
    g.set_defaults(func=cmd_gen_random)
    g.add_argument("--manifold", choices=("s2", "so3"), required=True)
    g.add_argument("--bandwidth", type=int, required=True)
    g.add_argument("--decay", type=float, default=1.0)
    g.add_argument("--channels", type=int, default=1)
    g.add_argument("--real", action="store_true", help="symmetrize so the signal is real-valued")
    g.add_argument("--out", required=True)
    g = gen.add_parser("harmonic", parents=[common], help="single unit coefficient")
    g.set_defaults(func=cmd_gen_harmonic)
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, default=None, help="second index; selects an SO(3) spectrum")
    g.add_argument("--manifold", choices=("s2", "so3"), default="s2")
    g.add_argument("--bandwidth", type=int, default=None)
    g.add_argument("--out", required=True)
    g = gen.add_parser("molecule", parents=[common], help="potential signal around an atom")
    g.set_defaults(func=cmd_gen_molecule)
    g.add_argument("--atoms", required=True)
    g.add_argument("--center", type=int, required=True)
    g.add_argument("--charge", type=float, required=True)
    g.add_argument("--bandwidth", type=int, default=16)
    g.add_argument("--spectral", action="store_true", help="write coefficients instead of samples")
    g.add_argument("--out", required=True)

    p = add("transform", cmd_transform, "grid <-> spectral transform")
    p.add_argument("--direction", choices=("fwd", "inv"), default=None,
                   help="fwd: grid to spectral, inv: spectral to grid (default: from the input kind)")
    p.add_argument("--manifold", choices=("s2", "so3"), default=None)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--bandwidth", type=int, default=None)
    p.add_argument("--out", required=True)

    p = add("decompose", cmd_decompose, "needlet decomposition")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--j0", type=int, default=None)
    p.add_argument("--out", required=True)

    p = add("reconstruct", cmd_reconstruct, "needlet reconstruction")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = add("convolve", cmd_convolve, "spectral convolution")
    p.add_argument("--signal", required=True)
    p.add_argument("--filter", required=True)
    p.add_argument("--normalization", choices=("integral", "product"), default="integral")
    p.add_argument("--out", required=True)

    p = add("rotate", cmd_rotate, "rotate a spectrum or needlet coefficients")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--out", required=True)

    p = add("shrink", cmd_shrink, "soft-threshold high-pass needlet coefficients")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--n", type=int, default=None, help="override the coefficient count N")
    p.add_argument("--out", required=True)

    p = add("pool", cmd_pool, "spectral pooling")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = add("filters", cmd_filters, "tabulate filter and generator profiles")
    p.add_argument("--grid", "--points", dest="points", type=int, default=1001)
    p.add_argument("--out", default=None)

    p = add("verify", cmd_verify, "numerical checks")
    p.add_argument("check", choices=("equivariance", "tight-frame", "partition"))
    p.add_argument("--bandwidth", type=int, default=16)
    p.add_argument("--sigma", type=float, default=1e-3)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--rotations", type=int, default=10)
    p.add_argument("--points", type=int, default=10_000)
    p.add_argument("--out", default=None)

    p = add("sweep-sigma", cmd_sweep_sigma, "equivariance error and compression versus sigma")
    p.add_argument("--from", dest="lo", type=float, default=1e-7)
    p.add_argument("--to", dest="hi", type=float, default=1.0)
    p.add_argument("--points", type=int, default=15)
    p.add_argument("--bandwidth", type=int, default=64)
    p.add_argument("--manifold", choices=("s2", "so3"), default="so3")
    p.add_argument("--decay", type=float, default=1.0)
    p.add_argument("--rotations", type=int, default=5)
    p.add_argument("--out", default=None)
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for key, default in (("seed", 0), ("precision", "double"), ("format", "text")):
            if not hasattr(args, key):
                setattr(args, key, default)
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContainerParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ContainerCorruptError as exc:
        print(f"corrupt container: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (PreconditionError, DegenerateGeometryError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
