#!/usr/bin/env python3
"""
State Manager Module
Centralizes the Streamlit session state of the interactive runner.
"""

from typing import Any, Dict, Optional

import streamlit as st

from core.models import ScenarioResult


class StateManager:
    """
    Wrapper around st.session_state to provide typed access to runner data.
    """

    _KEY_IS_PROCESSING = "state_is_processing"
    _KEY_RESULTS = "state_scenario_results"  # Dict[scenario name, ScenarioResult]
    _KEY_DOWNLOADS = "state_scenario_downloads"  # Dict[scenario name, zip bytes]

    def __init__(self):
        if self._KEY_RESULTS not in st.session_state:
            st.session_state[self._KEY_RESULTS] = {}
        if self._KEY_DOWNLOADS not in st.session_state:
            st.session_state[self._KEY_DOWNLOADS] = {}
        if self._KEY_IS_PROCESSING not in st.session_state:
            st.session_state[self._KEY_IS_PROCESSING] = False

    @property
    def is_processing(self) -> bool:
        return st.session_state.get(self._KEY_IS_PROCESSING, False)

    @is_processing.setter
    def is_processing(self, value: bool):
        st.session_state[self._KEY_IS_PROCESSING] = value

    # --- Results ---

    def set_result(self, name: str, result: ScenarioResult, zip_bytes: Optional[bytes] = None):
        st.session_state[self._KEY_RESULTS][name] = result
        if zip_bytes:
            st.session_state[self._KEY_DOWNLOADS][name] = zip_bytes

    def get_result(self, name: str) -> Optional[ScenarioResult]:
        return st.session_state[self._KEY_RESULTS].get(name)

    def get_download(self, name: str) -> Optional[bytes]:
        return st.session_state[self._KEY_DOWNLOADS].get(name)

    def get_all_results(self) -> Dict[str, Any]:
        return st.session_state[self._KEY_RESULTS]

    def clear_result(self, name: str):
        st.session_state[self._KEY_RESULTS].pop(name, None)
        st.session_state[self._KEY_DOWNLOADS].pop(name, None)

    def reset_all(self):
        """Full reset of the runner state."""
        st.session_state.clear()
        self.__init__()


state_manager = StateManager()
