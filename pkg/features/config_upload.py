#!/usr/bin/env python3
"""
Config Upload Feature
Accepts a YAML scenario file, or YAML pasted into a text box.
"""

from typing import Any, Dict

import streamlit as st

from core.models import ScenarioConfig
from core.parser import ScenarioParser
from features.base_feature import BaseScenarioFeature


class ConfigUploadFeature(BaseScenarioFeature):

    def get_feature_name(self) -> str:
        return "Config Upload"

    def get_input_interface(self, disabled: bool = False) -> Dict[str, Any]:
        input_method = st.radio(
            "**Input method:**",
            ["📁 Upload YAML", "📝 Paste YAML"],
            horizontal=True,
            key=self.get_session_key("input_method"),
            disabled=disabled,
        )
        input_data: Dict[str, Any] = {'input_method': input_method, 'is_valid': False}

        if input_method == "📝 Paste YAML":
            text = st.text_area(
                "**Scenario YAML:**",
                height=300,
                placeholder="version: 1\nname: my-run\nstructure: {kind: barrier, params: {U0: 50, d: 1}}",
                key=self.get_session_key("yaml_paste"),
                disabled=disabled,
            )
        else:
            uploaded_file = st.file_uploader(
                "**Upload scenario:**",
                type=['yaml', 'yml'],
                key=self.get_session_key("file_upload"),
                disabled=disabled,
            )
            text = uploaded_file.getvalue().decode("utf-8", errors="replace") if uploaded_file else ""
            if uploaded_file:
                input_data['filename'] = uploaded_file.name

        if text and text.strip():
            input_data['yaml_text'] = text
            input_data['is_valid'] = True
        else:
            input_data['error_message'] = "Upload or paste a scenario config first."
        return input_data

    def build_config(self, input_data: Dict[str, Any]) -> ScenarioConfig:
        return ScenarioParser.parse_text(input_data['yaml_text'])
