"""Command-line interface: ``tweetsurv {ingest,vocab,train,evaluate,replay,audit}``.

Settings come from built-in defaults, then an optional flat ``key = value``
config file (``--config``), then command-line flags; later sources win.

Exit codes: 0 success, 2 input or parse error, 3 configuration or
degenerate-data error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import cart, corpus, geostream, metrics, pipeline, textpipe
from ._rng import make_rng
from .queryproto import QueryParseError, default_protocol, parse_query

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    corpus: str | None = None
    stopwords: str | None = None
    model: str | None = None
    output_dir: str = "."
    query: str | None = None
    query_file: str | None = None
    protocol: str | None = None
    lang: str = "id"
    min_freq: int = 10
    min_split: int = 20
    min_bucket: int = 7
    cp: float = 0.01
    max_depth: int = 30
    train_fraction: float = 0.7
    bbox: tuple = (geostream.INDONESIA.lat_min, geostream.INDONESIA.lat_max, geostream.INDONESIA.lon_min, geostream.INDONESIA.lon_max)
    cell_deg: float = 0.5
    seed: int = 2016
    binary: bool = False

    def validate(self) -> None:
        if not self.lang:
            raise ConfigError("lang must be non-empty")
        if self.min_freq < 1:
            raise ConfigError("min_freq must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie strictly between 0 and 1")
        if self.protocol not in (None, "paper2016"):
            raise ConfigError(f"unknown protocol {self.protocol!r}; only 'paper2016' is built in")
        if sum(x is not None for x in (self.query, self.query_file, self.protocol)) > 1:
            raise ConfigError("choose at most one of query, query_file, protocol")
        try:
            self.fit_params()
            self.bbox_obj()
            geostream.GridSpec(self.bbox_obj(), self.cell_deg)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def fit_params(self) -> cart.FitParams:
        return cart.FitParams(self.min_split, self.min_bucket, self.cp, self.max_depth, self.seed)

    def bbox_obj(self) -> geostream.BBox:
        return geostream.BBox(*self.bbox)

    def out(self, name: str) -> Path:
        d = Path(self.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        return d / name


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(Config)}[name]
    try:
        if name == "bbox":
            parts = tuple(float(p) for p in raw.split(","))
            if len(parts) != 4:
                raise ValueError("expected lat_min,lat_max,lon_min,lon_max")
            return parts
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            return _BOOL[raw.strip().lower()]
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from None
    return raw


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment line."""
    known = {f.name for f in fields(Config)}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = _coerce(key, value)
    return out


def resolve_config(args: argparse.Namespace) -> Config:
    cfg = Config()
    if getattr(args, "config", None):
        for k, v in read_config(args.config).items():
            setattr(cfg, k, v)
    for f in fields(Config):
        v = getattr(args, f.name, None)
        if v is not None:
            if f.name == "bbox" and isinstance(v, str):
                v = _coerce("bbox", v)
            setattr(cfg, f.name, v)
    cfg.validate()
    return cfg


class _Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, msg: str = "") -> None:
        if not self.quiet:
            print(msg)


def _stopwords(cfg: Config):
    if cfg.stopwords:
        return textpipe.load_stopwords(cfg.stopwords)
    return textpipe.default_stopwords()


def _query(cfg: Config):
    if cfg.protocol == "paper2016":
        return default_protocol()
    if cfg.query is not None:
        return parse_query(cfg.query)
    if cfg.query_file is not None:
        return parse_query(Path(cfg.query_file).read_text(encoding="utf-8").strip())
    return None


def _require(value, what):
    if not value:
        raise ConfigError(f"no {what} given")
    return value


def _is_labeled(path) -> bool:
    for _, obj in corpus.iter_json_lines(path):
        return isinstance(obj, dict) and "label" in obj
    return False


# -- subcommands --------------------------------------------------------------


def cmd_ingest(cfg: Config, args, say) -> int:
    src = _require(args.input or cfg.corpus, "input corpus")
    records = corpus.load_labeled_corpus(src) if _is_labeled(src) else corpus.load_corpus(src)
    say(f"loaded          {len(records)}")
    records = corpus.dedupe(records)
    say(f"deduplicated    {len(records)}")
    records = corpus.drop_retweets(records)
    say(f"retweets gone   {len(records)}")
    records = corpus.filter_lang(records, cfg.lang)
    say(f"lang={cfg.lang:<10} {len(records)}")
    dest = Path(args.output) if args.output else cfg.out("cleaned.ndjson")
    corpus.dump_corpus(records, dest)
    say(f"wrote {dest}")
    return EXIT_OK


def cmd_vocab(cfg: Config, args, say) -> int:
    src = _require(args.input or cfg.corpus, "input corpus")
    records = corpus.load_corpus(src)
    sw = _stopwords(cfg)
    docs = [textpipe.prepare(r.id, r.text, sw) for r in records]
    vocab = textpipe.build_vocab(docs, cfg.min_freq)
    say(f"{len(docs)} documents, {len(vocab)} terms with frequency >= {cfg.min_freq}")
    with open(cfg.out("vocab.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["term", "frequency"])
        w.writerows(vocab.terms)
    tdm = textpipe.build_tdm(docs, vocab, cfg.binary)
    tdm.to_csv(cfg.out("tdm.csv"))
    if args.associate:
        if args.associate not in vocab:
            raise ConfigError(f"term {args.associate!r} is not in the vocabulary")
        assoc = textpipe.top_associations(tdm, args.associate, args.threshold)
        with open(cfg.out("associations.csv"), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["term", "correlation"])
            for t, r in assoc:
                w.writerow([t, f"{r:.6f}"])
        for t, r in assoc:
            say(f"  {t:<16} {r:.3f}")
    return EXIT_OK


def cmd_train(cfg: Config, args, say) -> int:
    src = _require(args.input or cfg.corpus, "labeled corpus")
    labeled = corpus.load_labeled_corpus(src)
    if not labeled:
        raise pipeline.DegenerateDataError("labeled corpus is empty")
    result = pipeline.train(
        labeled,
        _stopwords(cfg),
        cfg.min_freq,
        cfg.fit_params(),
        cfg.train_fraction,
        make_rng(cfg.seed, "split"),
        cfg.binary,
    )
    model_path = Path(cfg.model) if cfg.model else cfg.out("model.json")
    model_path.parent.mkdir(parents=True, exist_ok=True)
    pipeline.save_classifier(result.classifier, model_path)
    extra = {"n_train": result.n_train, "n_valid": result.n_valid}
    cfg.out("train_report.csv").write_text(metrics.report_csv(result.report, extra), encoding="utf-8")
    table = f"n_train {result.n_train}\nn_valid {result.n_valid}\n" + metrics.report_table({"Validation": result.report})
    cfg.out("train_report.txt").write_text(table, encoding="utf-8")
    say(f"vocabulary: {len(result.classifier.vocab)} terms")
    say(f"tree: {result.classifier.tree.n_leaves} leaves (unpruned {result.unpruned.n_leaves})")
    say(table.rstrip())
    say(f"wrote {model_path}")
    return EXIT_OK


def cmd_evaluate(cfg: Config, args, say) -> int:
    clf = pipeline.load_classifier(_require(cfg.model, "model (--model)"))
    paths = args.inputs or ([cfg.corpus] if cfg.corpus else [])
    _require(paths, "labeled corpus")
    if len(paths) > 2:
        raise ConfigError("evaluate takes at most two corpora (validation, testing)")
    sw = _stopwords(cfg)
    columns = {}
    for name, path in zip(("Validation", "Testing"), paths):
        _, report = pipeline.evaluate(clf, corpus.load_labeled_corpus(path), sw)
        columns[name] = report
    if len(columns) == 1:
        cfg.out("metrics.csv").write_text(metrics.report_csv(columns["Validation"]), encoding="utf-8")
    else:
        buf = ["metric,validation,testing"]
        for k in columns["Validation"]:
            cells = ["undefined" if c[k] is None else repr(float(c[k])) for c in columns.values()]
            buf.append(",".join([k, *cells]))
        cfg.out("metrics.csv").write_text("\n".join(buf) + "\n", encoding="utf-8")
    table = metrics.report_table(columns)
    cfg.out("metrics.txt").write_text(table, encoding="utf-8")
    say(table.rstrip())
    return EXIT_OK


def _parse_audit(spec: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in spec.split(","))
    except ValueError:
        raise ConfigError(f"--audit expects N_TRUE,N_FALSE, got {spec!r}") from None
    if a < 0 or b < 0:
        raise ConfigError("audit sizes must be non-negative")
    return a, b


def _write_hits(hits, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h in hits:
            fh.write(geostream.dumps_hit(h))
            fh.write("\n")


def cmd_replay(cfg: Config, args, say) -> int:
    clf = pipeline.load_classifier(_require(cfg.model, "model (--model)"))
    src = _require(args.input or cfg.corpus, "corpus")
    audit = _parse_audit(args.audit) if args.audit else None
    records = corpus.iter_corpus(src) if args.presorted else corpus.load_corpus(src)
    grid = geostream.GridSpec(cfg.bbox_obj(), cfg.cell_deg)
    agg = geostream.StreamAggregator(grid, predicted_only=not args.all_hits, audit=audit, seed=make_rng(cfg.seed, "audit"))
    stream = geostream.replay(records, clf.tree, clf.vocab, _stopwords(cfg), cfg.bbox_obj(), _query(cfg), clf.binary)
    with open(cfg.out("hits.ndjson"), "w", encoding="utf-8", newline="\n") as fh:
        for hit in stream:
            agg.add(hit)
            fh.write(geostream.dumps_hit(hit))
            fh.write("\n")
    geostream.write_grid_csv(agg.grid_counts, grid, cfg.out("grid.csv"))
    geostream.write_grid_geojson(agg.grid_counts, grid, cfg.out("grid.geojson"))
    daily = agg.daily()
    geostream.write_daily_csv(daily, cfg.out("daily.csv"))
    say(f"hits {agg.n_hits}, predicted TRUE {agg.n_true}")
    say(f"grid cells {len(agg.grid_counts)}, days {len(daily)}")
    if audit is not None:
        sample = agg.audit()
        _write_hits(sample, cfg.out("audit.ndjson"))
        say(f"audit sample {len(sample)} -> {cfg.out('audit.ndjson')}")
    return EXIT_OK


def cmd_audit(cfg: Config, args, say) -> int:
    hits = geostream.load_hits(args.input)
    n_true, n_false = _parse_audit(args.audit)
    sample = geostream.audit_sample(hits, n_true, n_false, make_rng(cfg.seed, "audit"))
    dest = Path(args.output) if args.output else cfg.out("audit.ndjson")
    _write_hits(sample, dest)
    say(f"audit sample {len(sample)} -> {dest}")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _common(defaults: bool) -> argparse.ArgumentParser:
    d = {} if defaults else {"default": argparse.SUPPRESS}
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value config file", **d)
    p.add_argument("--seed", type=int, help="master seed", **d)
    p.add_argument("--output-dir", dest="output_dir", help="directory for outputs", **d)
    p.add_argument("--quiet", action="store_true", help="suppress progress output", **d)
    return p


def _add_text_opts(p):
    p.add_argument("--stopwords", help="stopword file (default: bundled Indonesian list)")
    p.add_argument("--min-freq", dest="min_freq", type=int)
    p.add_argument("--binary", action="store_true", default=None, help="presence features instead of counts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tweetsurv", description="Filter, classify and aggregate health-related tweets.", parents=[_common(True)])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(False)

    p = sub.add_parser("ingest", parents=[common], help="dedupe, drop retweets, filter language")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--lang")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("vocab", parents=[common], help="vocabulary, term-document matrix, associations")
    p.add_argument("input", nargs="?")
    _add_text_opts(p)
    p.add_argument("--associate", metavar="TERM")
    p.add_argument("--threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("train", parents=[common], help="fit and validate the classifier")
    p.add_argument("input", nargs="?")
    _add_text_opts(p)
    p.add_argument("--model")
    p.add_argument("--min-split", dest="min_split", type=int)
    p.add_argument("--min-bucket", dest="min_bucket", type=int)
    p.add_argument("--cp", type=float)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="accuracy rates and AUC for labeled corpora")
    p.add_argument("inputs", nargs="*", metavar="CORPUS", help="validation [and testing] corpora")
    p.add_argument("--model")
    p.add_argument("--stopwords")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("replay", parents=[common], help="classify a geo stream and aggregate hits")
    p.add_argument("input", nargs="?")
    p.add_argument("--model")
    p.add_argument("--stopwords")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--query")
    q.add_argument("--query-file", dest="query_file")
    q.add_argument("--protocol", choices=["paper2016"])
    p.add_argument("--bbox", help="lat_min,lat_max,lon_min,lon_max")
    p.add_argument("--cell-deg", dest="cell_deg", type=float)
    p.add_argument("--audit", metavar="N_TRUE,N_FALSE")
    p.add_argument("--all-hits", action="store_true", help="aggregate every hit, not only predicted TRUE")
    p.add_argument("--presorted", action="store_true", help="stream the file lazily; it must be time-ordered")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("audit", parents=[common], help="stratified sample from a hits file")
    p.add_argument("input")
    p.add_argument("--audit", metavar="N_TRUE,N_FALSE", default="100,100")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    say = _Reporter(bool(getattr(args, "quiet", False)))
    try:
        cfg = resolve_config(args)
        return args.func(cfg, args, say)
    except (corpus.CorpusError, QueryParseError, cart.ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, pipeline.DegenerateDataError, geostream.InsufficientHitsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
