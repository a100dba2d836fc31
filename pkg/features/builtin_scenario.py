#!/usr/bin/env python3
"""
Builtin Scenario Feature
Picks one of the library scenarios, optionally with an edited acceleration.
"""

from typing import Any, Dict

import streamlit as st

from core.models import ScenarioConfig
from core.parser import ScenarioParser
from core.scenarios import get_builtin, list_scenarios
from features.base_feature import BaseScenarioFeature


class BuiltinScenarioFeature(BaseScenarioFeature):

    def get_feature_name(self) -> str:
        return "Builtin Scenario"

    def get_input_interface(self, disabled: bool = False) -> Dict[str, Any]:
        entries = list_scenarios()
        labels = {entry["name"]: f"{entry['name']}: {entry['description']}" for entry in entries}
        name = st.selectbox(
            "**Scenario:**",
            list(labels),
            format_func=labels.get,
            key=self.get_session_key("name"),
            disabled=disabled,
        )
        config = get_builtin(name)
        input_data: Dict[str, Any] = {'name': name, 'is_valid': True}

        if config.packet is not None and not config.cases and config.sweep is None:
            input_data['a_m_s2'] = st.number_input(
                "Acceleration a (m/s²)",
                value=float(config.motion.a_m_s2),
                step=1e4,
                format="%.4g",
                key=self.get_session_key("a"),
                disabled=disabled,
            )
        with st.expander("Scenario config (YAML)"):
            st.code(ScenarioParser.dump(config), language="yaml")
        return input_data

    def build_config(self, input_data: Dict[str, Any]) -> ScenarioConfig:
        config = get_builtin(input_data['name'])
        if 'a_m_s2' in input_data:
            config = ScenarioParser.with_overrides(config, {"motion.a_m_s2": float(input_data['a_m_s2'])})
        return config
