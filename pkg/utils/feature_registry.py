#!/usr/bin/env python3
"""
Feature Registry
Manages the available scenario sources (builtin library vs uploaded config).
"""

from typing import Any, Dict, List, Type

from utils.helpers import safe_log


class FeatureRegistry:
    """Central registry for dynamic loading of features."""

    _features = {}
    _handlers = {}

    @classmethod
    def register_feature(cls, feature_id: str, config: Dict[str, Any], handler_class: Type):
        cls._features[feature_id] = config
        cls._handlers[feature_id] = handler_class
        safe_log(f"Registry: Registered {feature_id}", "DEBUG")

    @classmethod
    def get_handler(cls, feature_id: str):
        if feature_id not in cls._handlers:
            raise ValueError(f"Unknown feature: {feature_id}")
        return cls._handlers[feature_id]()

    @classmethod
    def feature_ids(cls) -> List[str]:
        return list(cls._features)

    @classmethod
    def display_name(cls, feature_id: str) -> str:
        return cls._features.get(feature_id, {}).get('display_name', feature_id)


# --- Auto-register available features ---
def _register_default_features():
    try:
        from features.builtin_scenario import BuiltinScenarioFeature
        FeatureRegistry.register_feature(
            'builtin_scenario',
            {'display_name': '📚 Builtin Scenario'},
            BuiltinScenarioFeature
        )
    except ImportError as e:
        safe_log(f"Registry: builtin scenario feature missing: {e}", "WARNING")

    try:
        from features.config_upload import ConfigUploadFeature
        FeatureRegistry.register_feature(
            'config_upload',
            {'display_name': '📄 Config Upload'},
            ConfigUploadFeature
        )
    except ImportError as e:
        safe_log(f"Registry: config upload feature missing: {e}", "WARNING")


_register_default_features()
