#!/usr/bin/env python3
"""
Scenario Parser Module
1. Loads YAML scenario files (or already-loaded mappings).
2. Normalizes them into ScenarioConfig, collecting every problem into one error.
3. Applies dotted-path overrides for cases and sweeps.
"""

import copy
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from core.errors import ValidationError
from core.models import (CONFIG_VERSION, OUTPUT_KINDS, STRUCTURE_PARAMETERS, AnalysisConfig, CaseConfig,
                         GridConfig, MotionConfig, OutputsConfig, PacketConfig, RunMode, ScenarioConfig,
                         StationaryConfig, StructureConfig, StructureKind, SweepConfig, SynchronizeConfig,
                         TimeConfig)
from core.stationary import BRANCHES
from utils.helpers import safe_log

MIN_SCENARIO_POINTS = 64


def get_path(payload: Dict[str, Any], path: str) -> Any:
    node: Any = payload
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ValidationError(f"Parameter path '{path}' does not exist")
        node = node[part]
    return node


def set_path(payload: Dict[str, Any], path: str, value: Any) -> Dict[str, Any]:
    """Copy of payload with the dotted path set; intermediate sections are created."""
    result = copy.deepcopy(payload)
    parts = path.split(".")
    node = result
    for part in parts[:-1]:
        if node.get(part) is None:
            node[part] = {}
        if not isinstance(node[part], dict):
            raise ValidationError(f"Cannot set '{path}': '{part}' is not a section")
        node = node[part]
    node[parts[-1]] = copy.deepcopy(value)
    return result


class ScenarioParser:
    """
    Tolerant of missing optional sections, strict about the values present.
    """

    @staticmethod
    def load_file(path: Union[str, Path]) -> ScenarioConfig:
        path = Path(path)
        if not path.is_file():
            raise ValidationError(f"Config file not found: {path}")
        return ScenarioParser.parse_text(path.read_text(encoding="utf-8"))

    @staticmethod
    def parse_text(text: str) -> ScenarioConfig:
        try:
            payload = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            safe_log(f"Parser: YAML error: {exc}", "ERROR")
            raise ValidationError(f"Config is not valid YAML: {exc}") from exc
        return ScenarioParser.parse_payload_to_config(payload)

    @staticmethod
    def dump(config: ScenarioConfig) -> str:
        return yaml.safe_dump(config.to_dict(), sort_keys=False)

    @staticmethod
    def with_overrides(config: ScenarioConfig, overrides: Dict[str, Any]) -> ScenarioConfig:
        payload = config.to_dict()
        for path, value in (overrides or {}).items():
            payload = set_path(payload, path, value)
        return ScenarioParser.parse_payload_to_config(payload)

    @staticmethod
    def parse_payload_to_config(payload: Any) -> ScenarioConfig:
        if not isinstance(payload, dict):
            raise ValidationError(f"Config must be a mapping, got {type(payload).__name__}")
        problems: List[str] = []

        version = payload.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            problems.append(f"unsupported config version {version!r} (expected {CONFIG_VERSION})")

        mode = ScenarioParser._convert(problems, "mode", lambda: RunMode.from_string(payload.get("mode")))
        structure = ScenarioParser._structure(payload.get("structure"), problems)
        packet = ScenarioParser._section(payload, "packet", PacketConfig, problems)
        grid = ScenarioParser._section(payload, "grid", GridConfig, problems)
        time_config = ScenarioParser._section(payload, "time", TimeConfig, problems)
        motion = ScenarioParser._motion(payload.get("motion"), problems)
        analysis = ScenarioParser._section(payload, "analysis", AnalysisConfig, problems) or AnalysisConfig()
        stationary = ScenarioParser._section(payload, "stationary", StationaryConfig, problems)
        outputs = ScenarioParser._section(payload, "outputs", OutputsConfig, problems) or OutputsConfig()
        cases = ScenarioParser._cases(payload.get("cases"), problems)
        sweep = ScenarioParser._section(payload, "sweep", SweepConfig, problems)

        if mode == RunMode.DYNAMIC:
            for name, section in (("packet", packet), ("grid", grid), ("time", time_config)):
                if section is None and name not in payload:
                    problems.append(f"dynamic scenarios need a '{name}' section")
        if mode == RunMode.STATIONARY and stationary is None and "stationary" not in payload:
            problems.append("stationary scenarios need a 'stationary' section")

        ScenarioParser._check_values(problems, grid, packet, time_config, analysis, stationary, outputs, sweep)
        if problems:
            message = "Invalid scenario config: " + "; ".join(problems)
            safe_log(f"Parser: {message}", "ERROR")
            raise ValidationError(message)

        return ScenarioConfig(
            version=version,
            name=str(payload.get("name") or "scenario"),
            description=str(payload.get("description") or ""),
            mode=mode,
            structure=structure,
            packet=packet,
            grid=grid,
            time=time_config,
            motion=motion,
            analysis=analysis,
            stationary=stationary,
            outputs=outputs,
            cases=cases,
            sweep=sweep,
        )

    # --- Sections ---

    @staticmethod
    def _convert(problems: List[str], label: str, build):
        try:
            return build()
        except (TypeError, ValueError, KeyError) as exc:
            problems.append(f"{label}: {exc}")
            return None

    @staticmethod
    def _section(payload: Dict[str, Any], name: str, cls, problems: List[str]):
        data = payload.get(name)
        if data is None:
            return None
        if not isinstance(data, dict):
            problems.append(f"'{name}' must be a mapping")
            return None
        return ScenarioParser._convert(problems, name, lambda: cls(**data))

    @staticmethod
    def _structure(data: Any, problems: List[str]) -> Optional[StructureConfig]:
        if not isinstance(data, dict):
            problems.append("a 'structure' mapping with a 'kind' is required")
            return None
        kind = ScenarioParser._convert(problems, "structure.kind", lambda: StructureKind.from_string(data.get("kind")))
        if kind is None:
            return None
        params = dict(data.get("params") or {})
        missing = [key for key in STRUCTURE_PARAMETERS[kind] if key not in params]
        if missing:
            problems.append(f"structure '{kind.value}' is missing parameters {missing}")
            return None
        config = StructureConfig(kind=kind, params=params)
        # Builders validate thicknesses and counts.
        ScenarioParser._convert(problems, "structure", config.build)
        return config

    @staticmethod
    def _motion(data: Any, problems: List[str]) -> MotionConfig:
        if data is None:
            return MotionConfig()
        if not isinstance(data, dict):
            problems.append("'motion' must be a mapping")
            return MotionConfig()
        data = dict(data)
        synchronize = data.pop("synchronize", None)
        motion = ScenarioParser._convert(problems, "motion", lambda: MotionConfig(**data)) or MotionConfig()
        if synchronize is not None:
            motion.synchronize = ScenarioParser._convert(
                problems, "motion.synchronize", lambda: SynchronizeConfig(**(synchronize or {})))
        return motion

    @staticmethod
    def _cases(data: Any, problems: List[str]) -> List[CaseConfig]:
        if data is None:
            return []
        if not isinstance(data, list):
            problems.append("'cases' must be a list")
            return []
        cases = []
        for i, item in enumerate(data):
            if not isinstance(item, dict) or "label" not in item:
                problems.append(f"case #{i} needs a 'label'")
                continue
            cases.append(CaseConfig(label=str(item["label"]), overrides=dict(item.get("overrides") or {})))
        labels = [case.label for case in cases]
        if len(set(labels)) != len(labels):
            problems.append("case labels must be unique")
        return cases

    @staticmethod
    def _check_values(problems: List[str], grid, packet, time_config, analysis, stationary, outputs, sweep):
        if grid is not None:
            if not isinstance(grid.n_points, int) or grid.n_points < MIN_SCENARIO_POINTS or \
                    grid.n_points & (grid.n_points - 1):
                problems.append(f"grid.n_points must be a power of two >= {MIN_SCENARIO_POINTS}, got {grid.n_points}")
            if not grid.x_max_um > grid.x_min_um:
                problems.append("grid.x_max_um must exceed grid.x_min_um")
        if packet is not None:
            ScenarioParser._convert(problems, "packet", packet.spec)
        if time_config is not None:
            if not time_config.t_max_us > 0:
                problems.append("time.t_max_us must be positive")
            if time_config.theta_us is not None and not time_config.theta_us > 0:
                problems.append("time.theta_us must be positive (omit it to derive theta)")
        if analysis.branch not in BRANCHES:
            problems.append(f"analysis.branch must be one of {BRANCHES}")
        if stationary is not None:
            if not 0 < stationary.E_min_neV < stationary.E_max_neV:
                problems.append("stationary range needs 0 < E_min_neV < E_max_neV")
            if stationary.n_points < 2:
                problems.append("stationary.n_points must be at least 2")
            if stationary.branch not in BRANCHES:
                problems.append(f"stationary.branch must be one of {BRANCHES}")
        unknown = [kind for kind in outputs.which if kind not in OUTPUT_KINDS]
        if unknown:
            problems.append(f"unknown output kinds {unknown}")
        if sweep is not None and not isinstance(sweep.values, list):
            problems.append("sweep.values must be a list")
