"""Command-line front end.

Exit codes: 0 success, 2 invalid input or configuration, 3 result left
unstable or truncated by a cap, 4 unreadable or unwritable paths.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .algebra.field import FieldError, FiniteField, field_make
from .cache import Cache
from .function_field import DiscriminantError, field_from_discriminant, parse_discriminant
from .iwasawa import DEFAULT_N_MAX, iwasawa_data
from .jacobian import AbelianPGroup, LargePPart, sylow_p_structure
from .statistics import STATUS_TRUNCATED, Caps, DensityAccumulator, SweepStats, cohen_lenstra_density, iter_sweep, predicted_density
from .zeta import CapExceeded, class_number, l_polynomial

CACHE_ENV = "FFIWASAWA_CACHE"
EXIT_OK, EXIT_INVALID, EXIT_UNSTABLE, EXIT_IO = 0, 2, 3, 4
FORMATS = ("json", "csv", "table")

log = logging.getLogger("ffiwasawa")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    l: int
    d: int = 1
    p: int | None = None
    max_deg: int | None = None
    n_max: int = DEFAULT_N_MAX
    caps: Caps = field(default_factory=Caps)
    seed: int = 0
    cache_path: str | None = None
    output_format: str = "table"

    @property
    def q(self) -> int:
        return self.l**self.d

    def validate(self) -> "Config":
        if self.d < 1:
            raise ConfigError("d must be positive")
        try:
            FiniteField(self.l)
        except (FieldError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if self.p is not None:
            from sympy import isprime

            if self.p < 3 or not isprime(self.p):
                raise ConfigError("p must be an odd prime")
        if self.max_deg is not None:
            if self.max_deg < 1 or self.max_deg % 2 == 0:
                raise ConfigError("max_deg must be odd and >= 1")
            g = (self.max_deg - 1) // 2
            if self.q**g > self.caps.max_count_degree:
                raise ConfigError(
                    f"q^g = {self.q}^{g} exceeds max_count_degree {self.caps.max_count_degree}"
                )
        if self.n_max < 2:
            raise ConfigError("n_max must be at least 2")
        if min(asdict(self.caps).values()) < 1:
            raise ConfigError("caps must be positive")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        return self

    def to_record(self) -> dict:
        """Settings that determine the numbers; cache location is excluded."""
        out = asdict(self)
        out.pop("cache_path")
        out.pop("output_format")
        out["q"] = self.q
        return out

    def field(self) -> FiniteField:
        return field_make(self.l, self.d, self.seed)


def _config(args) -> Config:
    caps = Caps(
        max_count_degree=args.max_count_degree,
        max_resultant_degree=args.max_resultant_degree,
        max_p_part=args.max_p_part,
    )
    cache = None
    if not getattr(args, "no_cache", False):
        cache = getattr(args, "cache", None) or os.environ.get(CACHE_ENV) or None
    return Config(
        l=args.l, d=args.d, p=getattr(args, "p", None), max_deg=getattr(args, "max_deg", None),
        n_max=getattr(args, "n_max", DEFAULT_N_MAX), caps=caps, seed=args.seed,
        cache_path=cache, output_format=args.format,
    ).validate()


def _open_cache(cfg: Config) -> Cache | None:
    if not cfg.cache_path:
        return None
    path = Path(cfg.cache_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8"):
            pass
        return Cache(path)
    except OSError as exc:
        raise OSError(f"cache path {path} is not writable: {exc}") from None


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        out.write("field,value\n")
        for k, v in report.items():
            out.write(f"{k},{json.dumps(v) if isinstance(v, (list, dict)) else v}\n")
    else:
        width = max(len(k) for k in report)
        for k, v in report.items():
            out.write(f"{k.ljust(width)}  {v}\n")


def _field_and_disc(args, cfg: Config):
    F = cfg.field()
    return F, field_from_discriminant(F, parse_discriminant(F, args.disc))


def _lpoly_cached(K, cfg: Config, cache: Cache | None):
    key = K.key()
    L = cache.lpoly(key, K.q) if cache is not None else None
    if L is None:
        L = l_polynomial(K, cfg.caps.max_count_degree)
        if cache is not None:
            cache.put(key, L)
            cache.flush()
    return L


def cmd_lpoly(args) -> int:
    cfg = _config(args)
    _, K = _field_and_disc(args, cfg)
    L = _lpoly_cached(K, cfg, _open_cache(cfg))
    report = {
        "key": K.key(),
        "genus": K.genus,
        "lpoly": [str(c) for c in L.coeffs],
        "P": str(L),
        "h": str(class_number(L)),
        "version": __version__,
    }
    _emit(report, cfg.output_format)
    return EXIT_OK


def cmd_classgroup(args) -> int:
    cfg = _config(args)
    _, K = _field_and_disc(args, cfg)
    cache = _open_cache(cfg)
    L = _lpoly_cached(K, cfg, cache)
    h = class_number(L)
    report = {"key": K.key(), "genus": K.genus, "h": str(h), "p": cfg.p}
    code = EXIT_OK
    try:
        A = sylow_p_structure(K, cfg.p, h, seed=cfg.seed, max_p_part=cfg.caps.max_p_part)
        report.update({"cl_p": str(A), "invariant_factors": list(A.factors), "p_rank": A.rank})
    except LargePPart as exc:
        report.update({"cl_p": None, "status": "skipped-large-p-part", "message": str(exc)})
        code = EXIT_UNSTABLE
    report["version"] = __version__
    _emit(report, cfg.output_format)
    return code


def cmd_iwasawa(args) -> int:
    cfg = _config(args)
    _, K = _field_and_disc(args, cfg)
    L = _lpoly_cached(K, cfg, _open_cache(cfg))
    iw = iwasawa_data(L, cfg.p, cfg.n_max, cfg.caps.max_resultant_degree)
    report = {"key": K.key(), "genus": K.genus, **iw.to_record(), "version": __version__}
    _emit(report, cfg.output_format)
    if not iw.stable:
        log.error("lambda not stable within caps; partial e-sequence %s", list(iw.e_sequence))
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_predict(args) -> int:
    q = args.q if args.q is not None else args.l**args.d
    if q < 2:
        raise ConfigError("q must be at least 2")
    try:
        A = AbelianPGroup.parse(args.p, args.group)
    except ValueError as exc:
        raise ConfigError(f"malformed group {args.group!r}: {exc}") from None
    pred = predicted_density(q, A)
    ref = cohen_lenstra_density(A)
    report = {
        "q": q,
        "p": args.p,
        "group": str(A),
        "predicted": float(pred.value),
        "predicted_exact": f"{pred.value.numerator}/{pred.value.denominator}",
        "error_bound": pred.error,
        "terms": pred.terms,
        "cohen_lenstra": float(ref.value),
        "flags": pred.flags,
        "version": __version__,
    }
    if pred.flags["q_equiv_1_mod_p"]:
        log.warning("q = 1 mod p: outside the proven regime of the limit")
    _emit(report, args.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if cfg.max_deg is None or cfg.p is None:
        raise ConfigError("sweep needs --p and --max-deg")
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from None
    cache = _open_cache(cfg)
    F = cfg.field()
    acc = DensityAccumulator(cfg.q, cfg.p, cfg.max_deg)
    truncated = 0
    stats = SweepStats()

    def progress(msg):
        log.info(msg)

    records_path = out_dir / "records.jsonl"
    with open(records_path, "w", encoding="utf-8") as fh:
        for rec in iter_sweep(F, cfg.p, cfg.max_deg, cfg.caps, cfg.seed, cfg.n_max, cache=cache,
                              workers=args.workers, stats=stats, progress=progress):
            acc.add(rec)
            truncated += rec.status == STATUS_TRUNCATED
            fh.write(rec.to_json() + "\n")
    report = acc.report(cfg.to_record())
    (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
    (out_dir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    summary = {
        "fields": report.total,
        "ok": report.ok,
        "skipped": report.skipped,
        "truncated": report.truncated,
        "trivial_empirical": report.density("1"),
        "trivial_predicted": report.groups[0]["predicted"],
        "lambda_ge_1_positive": report.ranks[0]["lambda_ge_r_positive"],
        "records": str(records_path),
        "stats": asdict(stats),
    }
    _emit(summary, cfg.output_format)
    return EXIT_UNSTABLE if truncated else EXIT_OK


def _common(sp, p_required=False):
    sp.add_argument("--l", type=int, required=True, help="characteristic")
    sp.add_argument("--d", type=int, default=1, help="q = l^d")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=FORMATS, default="table")
    sp.add_argument("--cache", help=f"JSONL cache path (default ${CACHE_ENV})")
    sp.add_argument("--no-cache", action="store_true")
    sp.add_argument("--max-count-degree", type=int, default=Caps.max_count_degree)
    sp.add_argument("--max-resultant-degree", type=int, default=Caps.max_resultant_degree)
    sp.add_argument("--max-p-part", type=int, default=Caps.max_p_part)
    if p_required:
        sp.add_argument("--p", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ffiwasawa", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("lpoly", help="L-polynomial and class number of one field")
    _common(sp)
    sp.add_argument("--disc", required=True, help="c_0,...,c_n constant first")
    sp.set_defaults(func=cmd_lpoly)

    sp = sub.add_parser("classgroup", help="p-Sylow subgroup of the class group")
    _common(sp, p_required=True)
    sp.add_argument("--disc", required=True)
    sp.set_defaults(func=cmd_classgroup)

    sp = sub.add_parser("iwasawa", help="e_n, lambda and nu along the constant Z_p-tower")
    _common(sp, p_required=True)
    sp.add_argument("--disc", required=True)
    sp.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    sp.set_defaults(func=cmd_iwasawa)

    sp = sub.add_parser("sweep", help="all fields up to a discriminant degree, with density report")
    _common(sp, p_required=True)
    sp.add_argument("--max-deg", type=int, required=True)
    sp.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    sp.add_argument("--out", default="sweep-out", help="output directory")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("predict", help="predicted density of a p-group")
    sp.add_argument("--q", type=int)
    sp.add_argument("--l", type=int, default=0)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--group", default="1", help='e.g. "1", "3^1", "3^2 x 3^1"')
    sp.add_argument("--format", choices=FORMATS, default="table")
    sp.set_defaults(func=cmd_predict)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose or args.command == "sweep" else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, DiscriminantError, FieldError, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
