#!/usr/bin/env python3
"""
Wavepacket Lab - Interactive Runner Entry Point
Runs builtin or uploaded scenarios and offers their CSV/JSON results for download.
"""

import streamlit as st

from core.state import state_manager
from ui.runner_layout import RunnerLayout
from utils.feature_registry import FeatureRegistry

st.set_page_config(
    page_title="Wavepacket Lab",
    page_icon="🧪",
    layout="wide"
)


def main():
    """Main application entry point"""
    _render_header()

    try:
        col1, _ = st.columns([1, 3])
        with col1:
            st.markdown("### 🎯 Scenario Source")
            feature_key = st.radio(
                "Choose source:",
                FeatureRegistry.feature_ids(),
                format_func=FeatureRegistry.display_name,
                label_visibility="collapsed",
                key="main_scenario_source",
                disabled=state_manager.is_processing
            )

        st.divider()
        RunnerLayout().render(feature_key)

    except Exception as e:
        st.error(f"❌ Application Error: {str(e)}")
        with st.expander("Details"):
            st.code(str(e))


def _render_header():
    col1, col2 = st.columns([6, 1])
    with col1:
        st.title("🧪 Wavepacket Lab")
        st.caption("Neutron wave packets meeting moving and accelerated potential structures")
    with col2:
        if st.button("🔄 Reset", key="main_reset", use_container_width=True):
            state_manager.reset_all()
            st.rerun()
    st.divider()


if __name__ == "__main__":
    main()
