#!/usr/bin/env python3
"""
Base Feature Interface
Common interface for the runner's scenario sources (builtin library, uploaded config).
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple

from core.errors import SimulationError
from core.models import ScenarioConfig


class BaseScenarioFeature(ABC):
    """Base class for all scenario sources"""

    def __init__(self):
        # unique ID for UI keys (e.g., 'builtinscenario')
        self.feature_id = self.__class__.__name__.lower().replace('feature', '')
        self.session_key_prefix = f"{self.feature_id}_"

    @abstractmethod
    def get_input_interface(self, disabled: bool = False) -> Dict[str, Any]:
        """
        Render the input widgets.
        Returns:
            Dict containing input data and validation status
        """
        pass

    @abstractmethod
    def build_config(self, input_data: Dict[str, Any]) -> ScenarioConfig:
        """Turn validated input into a scenario config; raises ValidationError."""
        pass

    @abstractmethod
    def get_feature_name(self) -> str:
        pass

    # --- Common Helpers ---

    def get_session_key(self, key: str) -> str:
        return f"{self.session_key_prefix}{key}"

    def validate_input(self, input_data: Dict[str, Any]) -> Tuple[bool, str]:
        if not input_data:
            return False, "No input data provided"
        if not input_data.get('is_valid', True):
            return False, input_data.get('error_message', 'Invalid input')
        return True, ""

    def load_config(self, input_data: Dict[str, Any]) -> Tuple[bool, Optional[ScenarioConfig], Optional[str]]:
        """
        Returns:
            Tuple of (success, config, error_message)
        """
        is_valid, message = self.validate_input(input_data)
        if not is_valid:
            return False, None, message
        try:
            return True, self.build_config(input_data), None
        except SimulationError as e:
            return False, None, str(e)

    def apply_threads(self, input_data: Dict[str, Any], default: Optional[int] = None) -> Optional[int]:
        threads = input_data.get('threads') or default
        return int(threads) if threads else None
