#!/usr/bin/env python3
"""
Scenario Processor Module
Runs a scenario off the UI thread and packages its artifacts for download.
"""

import concurrent.futures
from typing import Any, Dict, Optional

from core.models import ScenarioConfig
from core.orchestrator import ScenarioOrchestrator, load_settings
from core.reporter import bundle_zip
from utils.helpers import safe_log

RUN_TIMEOUT_S = 3600


class ScenarioProcessor:
    def __init__(self, orchestrator: Optional[ScenarioOrchestrator] = None):
        self._orchestrator = orchestrator

    @property
    def orchestrator(self) -> ScenarioOrchestrator:
        if self._orchestrator is None:
            self._orchestrator = ScenarioOrchestrator(load_settings())
        return self._orchestrator

    def process_scenario(self, config: ScenarioConfig, out_dir: Optional[str] = None,
                         threads: Optional[int] = None, timeout_s: float = RUN_TIMEOUT_S) -> Dict[str, Any]:
        out_dir = out_dir or self.orchestrator.settings.get("output_root")
        with concurrent.futures.ThreadPoolExecutor(max_workers=1) as executor:
            future = executor.submit(self.orchestrator.run_scenario, config, out_dir, threads)
            try:
                result = future.result(timeout=timeout_s)
            except concurrent.futures.TimeoutError:
                safe_log(f"Processor: scenario '{config.name}' exceeded {timeout_s:g} s", "ERROR")
                return {"success": False, "error": f"Run exceeded {timeout_s:g} s", "result": None, "zip_bytes": None}

        package = {"success": result.success, "error": result.error, "result": result, "zip_bytes": None}
        if result.artifacts:
            try:
                package["zip_bytes"] = bundle_zip(result.artifacts, out_dir)
            except OSError as e:
                safe_log(f"Processor: packaging failed: {e}", "ERROR")
                package["error"] = package["error"] or str(e)
        return package


processor = ScenarioProcessor()
