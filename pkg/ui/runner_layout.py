#!/usr/bin/env python3
import streamlit as st

from core.models import ScenarioResult
from core.processor import processor
from core.state import state_manager
from utils.feature_registry import FeatureRegistry
from utils.helpers import format_timestamp

SUMMARY_METRICS = [
    ("peak_v", "Peak v (m/s)", "{:.5f}"),
    ("weight", "Weight", "{:.4f}"),
    ("a_tau", "a·τ (m/s)", "{:+.4f}"),
    ("dv_semiclassical", "Δv classical (m/s)", "{:+.4f}"),
]


class RunnerLayout:
    def render(self, selected_feature: str):
        try:
            feature_handler = FeatureRegistry.get_handler(selected_feature)
        except ValueError as e:
            st.error(f"❌ {str(e)}")
            return

        run_key = f"runner_run_{selected_feature}"
        name_key = f"runner_name_{selected_feature}"
        is_processing = state_manager.is_processing

        col_input, col_opts = st.columns([3, 1])
        with col_input:
            input_data = feature_handler.get_input_interface(disabled=is_processing)
        with col_opts:
            st.markdown("### ⚙️ Options")
            input_data['threads'] = st.number_input("Worker threads", min_value=1, max_value=64, value=2,
                                                    disabled=is_processing)

        st.markdown("---")
        c1, c2, c3 = st.columns([1, 2, 1])
        with c2:
            if st.button("🚀 Run Scenario", type="primary", use_container_width=True, disabled=is_processing):
                is_valid, message = feature_handler.validate_input(input_data)
                if not is_valid:
                    st.warning(f"⚠️ {message}")
                else:
                    state_manager.is_processing = True
                    st.session_state[run_key] = True
                    st.rerun()

        if state_manager.is_processing and st.session_state.get(run_key):
            self._run(feature_handler, input_data, run_key, name_key)
            return

        name = st.session_state.get(name_key)
        result = state_manager.get_result(name) if name else None
        if result is not None:
            self._show_result(result)

    def _run(self, feature_handler, input_data, run_key, name_key):
        try:
            success, config, error = feature_handler.load_config(input_data)
            if not success:
                raise ValueError(error)
            with st.status(f"🚀 Running '{config.name}'...", expanded=True) as status:
                st.write(f"Started {format_timestamp()}; {len(config.cases) or 1} case(s)")
                package = processor.process_scenario(config, threads=feature_handler.apply_threads(input_data))
                result = package.get('result')
                if result is None:
                    raise ValueError(package.get('error'))
                state_manager.set_result(config.name, result, package.get('zip_bytes'))
                st.session_state[name_key] = config.name
                label = "✅ Run complete" if result.success else "⚠️ Run finished with failures"
                status.update(label=label, state="complete", expanded=False)
        except Exception as e:
            st.error(f"❌ {str(e)}")
        finally:
            st.session_state.pop(run_key, None)
            state_manager.is_processing = False
        st.rerun()

    def _show_result(self, result: ScenarioResult):
        if result.success and not result.partial:
            st.success(f"✅ {result.name}: {len(result.artifacts)} files in {result.processing_time:.1f} s")
        elif result.success:
            st.warning(f"⚠️ {result.name}: partial results (time cap reached)")
        else:
            st.error(f"❌ {result.name}: {result.error}")

        zip_bytes = state_manager.get_download(result.name)
        if zip_bytes:
            st.download_button("📦 Download results (zip)", zip_bytes, f"{result.name}.zip",
                               use_container_width=True)

        for case in result.cases:
            with st.expander(f"{'✅' if case.success else '❌'} {case.label}", expanded=len(result.cases) == 1):
                if not case.success:
                    st.error(f"{case.error_type}: {case.error}")
                    continue
                columns = st.columns(len(SUMMARY_METRICS))
                for column, (key, label, pattern) in zip(columns, SUMMARY_METRICS):
                    value = case.summary.get(key)
                    column.metric(label, pattern.format(value) if value is not None else "n/a")
                shifts = {name: case.summary[name] for name in ("shift_vs_initial", "shift_vs_ref")
                          if case.summary.get(name)}
                if shifts:
                    st.table(shifts)
                for warning in case.warnings:
                    st.caption(f"⚠️ {warning}")

        with st.expander("Summary JSON"):
            st.json(result.summary)
