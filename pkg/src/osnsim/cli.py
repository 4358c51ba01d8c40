"""Command-line pipeline driver.

Subcommands mirror the workflow: synth -> ingest -> influence / shocks ->
simulate (mbm | macm | shd, with --ifn and --mix-shd variants) ->
evaluate -> report / plot.  Every value a command actually uses (flag,
config-file entry, or default) is echoed into a manifest written next to
each artifact, so reruns are reproducible and nothing is hidden.

Config files are YAML with one section per subcommand; explicit flags
win over config entries, which win over defaults.  Relative paths
resolve under $OSNSIM_DATA_DIR when it is set.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import yaml

from .errors import OsnsimError
from .events import Platform, write_events
from .exogenous import (
    ShockConfig,
    build_exogenous_network,
    detect_shocks,
    load_shock_csv,
    read_masks,
    write_masks,
)
from .influence import (
    InfluenceNetwork,
    build_influence_network,
    snowball_sample,
    split_by_interaction_share,
)
from .ingestion import bin_activity, binarize, load_events, tick_frame, write_rejects
from .macm import MultiActionCascadeModel
from .manifest import write_manifest
from .mbm import MultiplexityModel
from .metrics import MetricReport, compare, evaluate as evaluate_logs
from .shd import HistoricalReplayModel, MixConfig, mix
from .synth import (
    GroundTruthAnnotations,
    PlantedEdge,
    ScenarioConfig,
    ShockSpike,
    generate,
    standard_scenario,
)


def _data_dir() -> Path:
    return Path(os.environ.get("OSNSIM_DATA_DIR", "."))


def _resolve(path) -> Path:
    p = Path(path)
    return p if p.is_absolute() else _data_dir() / p


def _fail(code: str, message: str, exit_code: int = 1):
    sys.stderr.write(json.dumps({"error": code, "message": message}, sort_keys=True))
    sys.stderr.write("\n")
    sys.exit(exit_code)


def _load_config(path, section: str) -> dict:
    if path is None:
        return {}
    try:
        with open(_resolve(path), "r", encoding="utf-8") as fh:
            obj = yaml.safe_load(fh) or {}
    except FileNotFoundError:
        _fail("bad_config", f"config file not found: {path}", exit_code=2)
    except yaml.YAMLError as exc:
        _fail("bad_config", f"config parse error in {path}: {exc}", exit_code=2)
    if not isinstance(obj, dict):
        _fail("bad_config", f"config root must be a mapping in {path}", exit_code=2)
    section_obj = obj.get(section, {})
    if not isinstance(section_obj, dict):
        _fail("bad_config", f"config section {section!r} must be a mapping", exit_code=2)
    return section_obj


def _merge(flags: dict, config: dict, defaults: dict) -> dict:
    """flag (if given) > config entry > default; unknown config keys are errors."""
    unknown = set(config) - set(defaults)
    if unknown:
        _fail("bad_config", f"unknown config keys: {sorted(unknown)}", exit_code=2)
    resolved = dict(defaults)
    resolved.update({k: v for k, v in config.items() if v is not None})
    resolved.update({k: v for k, v in flags.items() if v is not None})
    return resolved


def _guard(fn):
    """Run a command body, mapping package errors to structured stderr JSON."""
    try:
        fn()
    except OsnsimError as exc:
        _fail(exc.code, str(exc))
    except FileNotFoundError as exc:
        _fail("io_error", str(exc))


@click.group()
def main():
    """Social-network activity simulation pipeline."""


@main.command()
@click.option("--config", "config_path", type=str, default=None, help="YAML config file.")
@click.option("--scenario", type=str, default=None,
              help="'standard' or a YAML file with scenario fields.")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=str, default=None, help="Output event JSONL path.")
@click.option("--annotations", "annotations_path", type=str, default=None)
@click.option("--shocks-dir", type=str, default=None,
              help="Directory for per-source ts,value CSV files.")
def synth(config_path, scenario, seed, out, annotations_path, shocks_dir):
    """Generate a synthetic ground-truth log with planted structure."""
    def run():
        cfg_section = _load_config(config_path, "synth")
        resolved = _merge(
            {"scenario": scenario, "seed": seed, "out": out,
             "annotations": annotations_path, "shocks_dir": shocks_dir},
            cfg_section,
            {"scenario": "standard", "seed": 1234, "out": "synth-events.jsonl",
             "annotations": "synth-annotations.json", "shocks_dir": None},
        )
        name = resolved["scenario"]
        if name == "standard":
            scenario_cfg = standard_scenario(seed=resolved["seed"])
        else:
            with open(_resolve(name), "r", encoding="utf-8") as fh:
                raw = yaml.safe_load(fh) or {}
            raw.setdefault("seed", resolved["seed"])
            raw["planted_edges"] = [PlantedEdge(**e) for e in raw.get("planted_edges", [])]
            raw["shock_schedule"] = [ShockSpike(**s) for s in raw.get("shock_schedule", [])]
            if "platform" in raw:
                raw["platform"] = Platform(raw["platform"])
            scenario_cfg = ScenarioConfig(**raw)
        events, annotations = generate(scenario_cfg)
        out_path = _resolve(resolved["out"])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_events(out_path, events)
        ann_path = _resolve(resolved["annotations"])
        annotations.to_json(ann_path)
        outputs = {"events": out_path, "annotations": ann_path}
        if resolved["shocks_dir"] is not None and annotations.shock_series:
            shocks_path = _resolve(resolved["shocks_dir"])
            shocks_path.mkdir(parents=True, exist_ok=True)
            for source, values in sorted(annotations.shock_series.items()):
                csv_path = shocks_path / f"{source}.csv"
                with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write("ts,value\n")
                    for i, value in enumerate(values):
                        ts = scenario_cfg.t0 + i * scenario_cfg.tick_len
                        fh.write(f"{ts},{value:.9g}\n")
                outputs[f"shock:{source}"] = csv_path
        write_manifest(str(out_path) + ".manifest.json", "synth", resolved,
                       outputs=outputs, seed=resolved["seed"])
        click.echo(f"wrote {len(events)} events to {out_path}")
    _guard(run)


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--events", "events_path", type=str, required=True)
@click.option("--out", type=str, default=None)
@click.option("--rejects", "rejects_path", type=str, default=None)
@click.option("--platform", type=click.Choice([p.value for p in Platform]), default=None)
@click.option("--start", type=int, default=None, help="Keep events with ts >= start.")
@click.option("--end", type=int, default=None, help="Keep events with ts < end.")
def ingest(config_path, events_path, out, rejects_path, platform, start, end):
    """Load, validate, filter and sort an event log; collect rejects."""
    def run():
        resolved = _merge(
            {"events": events_path, "out": out, "rejects": rejects_path,
             "platform": platform, "start": start, "end": end},
            _load_config(config_path, "ingest"),
            {"events": None, "out": "events.jsonl", "rejects": "rejects.jsonl",
             "platform": None, "start": None, "end": None},
        )
        in_path = _resolve(resolved["events"])
        result = load_events(
            in_path,
            platform=Platform(resolved["platform"]) if resolved["platform"] else None,
            t_start=resolved["start"], t_end=resolved["end"],
        )
        out_path = _resolve(resolved["out"])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_events(out_path, result.events)
        rej_path = _resolve(resolved["rejects"])
        write_rejects(rej_path, result.rejects)
        write_manifest(str(out_path) + ".manifest.json", "ingest", resolved,
                       inputs={"events": in_path},
                       outputs={"events": out_path, "rejects": rej_path})
        click.echo(f"{len(result.events)} events, {len(result.rejects)} rejects")
    _guard(run)


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--events", "events_path", type=str, required=True)
@click.option("--out", type=str, default=None)
@click.option("--lag", type=int, default=None)
@click.option("--nte-threshold", type=float, default=None)
@click.option("--tick-len", type=int, default=None)
@click.option("--binarize-threshold", type=int, default=None)
def influence(config_path, events_path, out, lag, nte_threshold, tick_len,
              binarize_threshold):
    """Build the static endogenous influence network (edge-list CSV)."""
    def run():
        resolved = _merge(
            {"events": events_path, "out": out, "lag": lag,
             "nte_threshold": nte_threshold, "tick_len": tick_len,
             "binarize_threshold": binarize_threshold},
            _load_config(config_path, "influence"),
            {"events": None, "out": "influence.csv", "lag": 1, "nte_threshold": 0.1,
             "tick_len": 3600, "binarize_threshold": 1},
        )
        in_path = _resolve(resolved["events"])
        events = load_events(in_path).events
        net = build_influence_network(
            events, lag=resolved["lag"], nte_threshold=resolved["nte_threshold"],
            tick_len=resolved["tick_len"],
            binarize_threshold=resolved["binarize_threshold"],
        )
        out_path = _resolve(resolved["out"])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        net.to_csv(out_path)
        write_manifest(str(out_path) + ".manifest.json", "influence", resolved,
                       inputs={"events": in_path}, outputs={"network": out_path})
        click.echo(f"{len(net.edges)} influence edges over {len(net.nodes)} nodes")
    _guard(run)


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--series", "series_specs", type=str, multiple=True,
              help="name=path.csv (repeatable).")
@click.option("--out", type=str, default=None, help="Sparse mask JSONL path.")
@click.option("--order", type=int, default=None)
@click.option("--cutoff-frac", type=float, default=None)
@click.option("--window", type=int, default=None)
@click.option("--z-threshold", type=float, default=None)
@click.option("--tick-len", type=int, default=None)
@click.option("--events", "events_path", type=str, default=None,
              help="Event log for frame alignment and the exogenous network.")
@click.option("--exo-out", type=str, default=None,
              help="Also build the shock->user network CSV.")
@click.option("--nte-threshold", type=float, default=None)
@click.option("--lag", type=int, default=None)
def shocks(config_path, series_specs, out, order, cutoff_frac, window, z_threshold,
           tick_len, events_path, exo_out, nte_threshold, lag):
    """Detect anomalies in exogenous series; optionally link shocks to users."""
    def run():
        resolved = _merge(
            {"series": list(series_specs) or None, "out": out, "order": order,
             "cutoff_frac": cutoff_frac, "window": window, "z_threshold": z_threshold,
             "tick_len": tick_len, "events": events_path, "exo_out": exo_out,
             "nte_threshold": nte_threshold, "lag": lag},
            _load_config(config_path, "shocks"),
            {"series": None, "out": "masks.jsonl", "order": 2, "cutoff_frac": 0.1,
             "window": 24, "z_threshold": 3.0, "tick_len": 3600, "events": None,
             "exo_out": None, "nte_threshold": 0.1, "lag": 1},
        )
        if not resolved["series"]:
            _fail("bad_config", "at least one --series name=path.csv is required",
                  exit_code=2)
        cfg = ShockConfig(cutoff_frac=resolved["cutoff_frac"], order=resolved["order"],
                          window=resolved["window"], z_threshold=resolved["z_threshold"])
        frame_t0 = None
        frame_ticks = None
        events = None
        inputs = {}
        if resolved["events"]:
            events_file = _resolve(resolved["events"])
            events = load_events(events_file).events
            inputs["events"] = events_file
            frame_t0, frame_ticks = tick_frame(events, resolved["tick_len"])
        masks = []
        for spec in resolved["series"]:
            name, _, path = spec.partition("=")
            if not path:
                name, path = Path(spec).stem, spec
            csv_path = _resolve(path)
            series = load_shock_csv(csv_path, source=name,
                                    tick_len=resolved["tick_len"],
                                    t0=frame_t0, n_ticks=frame_ticks)
            masks.append(detect_shocks(series, cfg))
            inputs[f"series:{name}"] = csv_path
        out_path = _resolve(resolved["out"])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_masks(out_path, masks)
        outputs = {"masks": out_path}
        if resolved["exo_out"]:
            if events is None:
                _fail("bad_config", "--exo-out requires --events", exit_code=2)
            activity = bin_activity(events, resolved["tick_len"])
            user_bits = [binarize(s) for _, s in sorted(activity.items())]
            net = build_exogenous_network(masks, user_bits, lag=resolved["lag"],
                                          nte_threshold=resolved["nte_threshold"])
            exo_path = _resolve(resolved["exo_out"])
            net.to_csv(exo_path)
            outputs["exogenous"] = exo_path
            click.echo(f"{len(net.edges)} shock->user edges")
        write_manifest(str(out_path) + ".manifest.json", "shocks", resolved,
                       inputs=inputs, outputs=outputs)
        click.echo(f"wrote masks for {len(masks)} sources to {out_path}")
    _guard(run)


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--model", type=click.Choice(["mbm", "macm", "shd"]), required=True)
@click.option("--events", "events_path", type=str, required=True,
              help="Training event log.")
@click.option("--ticks", type=int, default=None, help="Forecast horizon in ticks.")
@click.option("--out", type=str, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--tick-len", type=int, default=None)
@click.option("--platform", type=click.Choice([p.value for p in Platform]), default=None)
@click.option("--ifn", is_flag=True, default=None,
              help="Initialize from the snowball-sampled influential users only.")
@click.option("--ifn-waves", type=int, default=None)
@click.option("--mix-shd", is_flag=True, default=None,
              help="Mix with historical replay for the less-active users.")
@click.option("--shd-fraction", type=float, default=None,
              help="Override the replay interaction share.")
@click.option("--shd-window-weeks", type=float, default=None)
@click.option("--endogenous", "endogenous_path", type=str, default=None)
@click.option("--exogenous", "exogenous_path", type=str, default=None)
@click.option("--masks", "masks_path", type=str, default=None)
@click.option("--nte-threshold", type=float, default=None)
@click.option("--lag", type=int, default=None)
@click.option("--events-per-tick", type=float, default=None)
@click.option("--node-add-rate", type=float, default=None)
@click.option("--removal-age", type=float, default=None)
@click.option("--age-update", type=click.Choice(["split", "sequenced"]), default=None)
@click.option("--inbox-capacity", type=int, default=None, help="MACM m.")
@click.option("--noise-sigma", type=float, default=None)
def simulate(config_path, model, events_path, ticks, out, seed, tick_len, platform,
             ifn, ifn_waves, mix_shd, shd_fraction, shd_window_weeks, endogenous_path,
             exogenous_path, masks_path, nte_threshold, lag, events_per_tick,
             node_add_rate, removal_age, age_update, inbox_capacity, noise_sigma):
    """Simulate a forecast horizon with one model (optionally IFN and/or SHD-mixed)."""
    def run():
        resolved = _merge(
            {"model": model, "events": events_path, "ticks": ticks, "out": out,
             "seed": seed, "tick_len": tick_len, "platform": platform, "ifn": ifn,
             "ifn_waves": ifn_waves, "mix_shd": mix_shd, "shd_fraction": shd_fraction,
             "shd_window_weeks": shd_window_weeks, "endogenous": endogenous_path,
             "exogenous": exogenous_path, "masks": masks_path,
             "nte_threshold": nte_threshold, "lag": lag,
             "events_per_tick": events_per_tick, "node_add_rate": node_add_rate,
             "removal_age": removal_age, "age_update": age_update,
             "inbox_capacity": inbox_capacity, "noise_sigma": noise_sigma},
            _load_config(config_path, "simulate"),
            {"model": None, "events": None, "ticks": 168, "out": "sim-events.jsonl",
             "seed": 0, "tick_len": 3600, "platform": None, "ifn": False,
             "ifn_waves": 1, "mix_shd": False, "shd_fraction": None,
             "shd_window_weeks": 4, "endogenous": None, "exogenous": None,
             "masks": None, "nte_threshold": 0.1, "lag": 1, "events_per_tick": None,
             "node_add_rate": None, "removal_age": None, "age_update": "split",
             "inbox_capacity": 10, "noise_sigma": 0.01},
        )
        in_path = _resolve(resolved["events"])
        train = load_events(in_path).events
        inputs = {"events": in_path}
        horizon = resolved["ticks"]
        platform_arg = Platform(resolved["platform"]) if resolved["platform"] else None

        endo = None
        if resolved["endogenous"]:
            endo_path = _resolve(resolved["endogenous"])
            endo = InfluenceNetwork.from_csv(endo_path)
            inputs["endogenous"] = endo_path

        train_model = train
        ifn_users = None
        if resolved["ifn"]:
            net = endo if endo is not None else build_influence_network(
                train, lag=resolved["lag"], nte_threshold=resolved["nte_threshold"],
                tick_len=resolved["tick_len"])
            seeds = {e.source for e in net.edges} | {e.target for e in net.edges}
            seeds &= {e.actor for e in train}
            ifn_users = snowball_sample(net, seeds, resolved["ifn_waves"]) if seeds else set()
            train_model = [e for e in train if e.actor in ifn_users]
            if not train_model:
                _fail("empty_log", "IFN filtering removed every training event")

        if resolved["model"] == "mbm":
            sim_model = MultiplexityModel(
                node_add_rate=resolved["node_add_rate"],
                events_per_tick=resolved["events_per_tick"],
                removal_age=resolved["removal_age"], seed=resolved["seed"],
                tick_len=resolved["tick_len"], age_update=resolved["age_update"],
                platform=platform_arg,
            )
            sim_model.fit(train_model)
            model_events = sim_model.predict(horizon)
        elif resolved["model"] == "macm":
            exo = None
            if resolved["exogenous"]:
                exo_path = _resolve(resolved["exogenous"])
                exo = InfluenceNetwork.from_csv(exo_path)
                inputs["exogenous"] = exo_path
            sim_model = MultiActionCascadeModel(
                m=resolved["inbox_capacity"], noise_sigma=resolved["noise_sigma"],
                seed=resolved["seed"], tick_len=resolved["tick_len"],
                endogenous=endo, exogenous=exo,
                nte_threshold=resolved["nte_threshold"], lag=resolved["lag"],
                platform=platform_arg,
            )
            sim_model.fit(train_model)
            shocks_arg = None
            if resolved["masks"]:
                masks_file = _resolve(resolved["masks"])
                inputs["masks"] = masks_file
                _, n_train = tick_frame(train, resolved["tick_len"])
                full = read_masks(masks_file, n_train + horizon,
                                  tick_len=resolved["tick_len"])
                shocks_arg = {name: m.bits[n_train:]
                              for name, m in sorted(full.items())}
            model_events = sim_model.predict(horizon, shocks=shocks_arg)
        else:  # shd
            sim_model = HistoricalReplayModel(
                window_weeks=resolved["shd_window_weeks"],
                tick_len=resolved["tick_len"])
            sim_model.fit(train_model)
            model_events = sim_model.predict(horizon)

        mix_summary = None
        out_events = model_events
        if resolved["mix_shd"]:
            fraction = resolved["shd_fraction"]
            if fraction is None:
                fraction = MixConfig().fraction(bool(resolved["ifn"]))
            split = split_by_interaction_share(train, fraction)
            replayer = HistoricalReplayModel(
                window_weeks=resolved["shd_window_weeks"],
                tick_len=resolved["tick_len"]).fit(train)
            shd_events = replayer.predict(horizon)
            out_events = mix(model_events, shd_events, split)
            mix_summary = {
                "shd_fraction": fraction,
                "full_model_shd_fraction": MixConfig().full_model_shd_fraction,
                "ifn_shd_fraction": MixConfig().ifn_shd_fraction,
                "active_users": sorted(split.active),
                "less_active_users": sorted(split.less_active),
                "model_events": len(model_events),
                "shd_events": len(shd_events),
                "mixed_events": len(out_events),
            }

        out_path = _resolve(resolved["out"])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_events(out_path, out_events)
        config_echo = dict(resolved)
        if mix_summary:
            config_echo["mix"] = mix_summary
        if ifn_users is not None:
            config_echo["ifn_users"] = sorted(ifn_users)
        write_manifest(str(out_path) + ".manifest.json", "simulate", config_echo,
                       inputs=inputs, outputs={"events": out_path},
                       seed=resolved["seed"])
        click.echo(f"wrote {len(out_events)} events to {out_path}")
    _guard(run)


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--sim", "sim_path", type=str, required=True)
@click.option("--truth", "truth_path", type=str, required=True)
@click.option("--out-dir", type=str, default=None)
@click.option("--tick-len", type=int, default=None)
@click.option("--top-k", type=int, default=None)
@click.option("--rbo-persistence", type=float, default=None)
def evaluate(config_path, sim_path, truth_path, out_dir, tick_len, top_k,
             rbo_persistence):
    """Score a simulated log against ground truth (CSV + JSON report)."""
    def run():
        resolved = _merge(
            {"sim": sim_path, "truth": truth_path, "out_dir": out_dir,
             "tick_len": tick_len, "top_k": top_k,
             "rbo_persistence": rbo_persistence},
            _load_config(config_path, "evaluate"),
            {"sim": None, "truth": None, "out_dir": "report", "tick_len": 3600,
             "top_k": 100, "rbo_persistence": 0.9},
        )
        sim_file = _resolve(resolved["sim"])
        truth_file = _resolve(resolved["truth"])
        sim_events = load_events(sim_file).events
        truth_events = load_events(truth_file).events
        report = evaluate_logs(sim_events, truth_events,
                               tick_len=resolved["tick_len"],
                               top_k=resolved["top_k"],
                               rbo_persistence=resolved["rbo_persistence"])
        out_path = _resolve(resolved["out_dir"])
        out_path.mkdir(parents=True, exist_ok=True)
        report.to_csv(out_path / "report.csv")
        report.to_json(out_path / "report.json")
        write_manifest(out_path / "report.manifest.json", "evaluate", resolved,
                       inputs={"sim": sim_file, "truth": truth_file},
                       outputs={"csv": out_path / "report.csv",
                                "json": out_path / "report.json"})
        ok = [r for r in report.rows if r.status == "ok"]
        skipped = [r for r in report.rows if r.status != "ok"]
        click.echo(f"{len(ok)} metric rows, {len(skipped)} skipped-with-reason")
    _guard(run)


def _report_from_json(path) -> MetricReport:
    from .metrics import MetricRow
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    rows = []
    for level, metrics in obj["levels"].items():
        for metric, platforms in metrics.items():
            for platform, entry in platforms.items():
                rows.append(MetricRow(
                    level=level, metric=metric, platform=platform,
                    error_metric=entry["error_metric"], error=entry["error"],
                    normalized=entry["normalized"], status=entry["status"],
                    reason=entry.get("reason", ""),
                ))
    return MetricReport(rows=rows, normalization=obj.get("normalization", ""))


@main.command()
@click.option("--run", "runs", type=str, multiple=True, required=True,
              help="name=report.json (repeatable).")
@click.option("--out-dir", type=str, default="combined-report")
def report(runs, out_dir):
    """Normalize several models' reports against each other (Table-style output)."""
    def run():
        reports = {}
        for spec in runs:
            name, _, path = spec.partition("=")
            if not path:
                _fail("bad_config", f"--run needs name=path, got {spec!r}", exit_code=2)
            reports[name] = _report_from_json(_resolve(path))
        compare(reports)
        out_path = _resolve(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        combined = {}
        for name, rpt in sorted(reports.items()):
            combined[name] = rpt.to_obj()
        with open(out_path / "combined.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(combined, fh, sort_keys=True, indent=2)
            fh.write("\n")
        with open(out_path / "combined.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("model,level,metric,platform,error_metric,error,normalized,status\n")
            for name, rpt in sorted(reports.items()):
                for r in rpt.rows:
                    error = "" if r.error is None else f"{r.error:.9g}"
                    normalized = "" if r.normalized is None else f"{r.normalized:.9g}"
                    status = r.status if r.status == "ok" else f"skipped:{r.reason}"
                    fh.write(f"{name},{r.level},{r.metric},{r.platform},"
                             f"{r.error_metric},{error},{normalized},{status}\n")
        write_manifest(out_path / "combined.manifest.json", "report",
                       {"runs": list(runs), "out_dir": str(out_dir)})
        click.echo(f"combined report for {len(reports)} models in {out_path}")
    _guard(run)


@main.command()
@click.option("--report", "report_path", type=str, required=True,
              help="report.json from evaluate.")
@click.option("--out-dir", type=str, default="plots")
def plot(report_path, out_dir):
    """Render per-level normalized-error bar charts (PNG)."""
    def run():
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        rpt = _report_from_json(_resolve(report_path))
        out_path = _resolve(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        levels = sorted({r.level for r in rpt.rows})
        written = []
        for level in levels:
            rows = [r for r in rpt.rows
                    if r.level == level and r.status == "ok" and r.normalized is not None]
            if not rows:
                continue
            labels = [f"{r.metric}\n({r.platform})" for r in rows]
            values = [r.normalized for r in rows]
            fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(rows)), 4))
            ax.bar(range(len(rows)), values, color="#4878a8")
            ax.set_xticks(range(len(rows)))
            ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
            ax.set_ylabel("normalized error")
            ax.set_ylim(0, 1.05)
            ax.set_title(f"{level}-level metrics")
            fig.tight_layout()
            target = out_path / f"{level}.png"
            fig.savefig(target, dpi=120)
            plt.close(fig)
            written.append(target)
        click.echo(f"wrote {len(written)} plots to {out_path}")
    _guard(run)


if __name__ == "__main__":
    main()
