import json
import os
import tempfile
from typing import Dict, Any

from dotenv import load_dotenv

from error_handler import error_handler


class Settings:
    """Handles saving and loading numerical caps and tolerances."""

    DEFAULT_SETTINGS = {
        # Enumeration and combinatorics
        "enumeration_cap": 24,  # largest volume the brute-force oracle may enumerate
        "tableau_cap": 200000,  # fillings visited per skew Q evaluation
        "pfaffian_reference_cap": 12,
        # Series and kernels
        "series_epsilon": 1e-16,
        "series_margin": 16,
        "circle_min_points": 512,
        "circle_max_points": 1 << 18,
        "circle_tolerance": 1e-14,  # relative aliasing tail that ends the FFT doubling
        "window_tolerance": 1e-12,
        # Quadrature
        "quad_epsabs": 1e-13,
        "quad_epsrel": 1e-11,
        "quad_limit": 400,
        "chi_continuity": 1e-9,
        "shape_chi_max": 60.0,
        # Volume series
        "volume_max_terms": 1000000,
        # Runtime
        "workers": 4,
        "cache_enabled": True,
        "cache_dir": tempfile.gettempdir(),
        "log_level": "WARNING",
        "log_file": None,
    }

    def __init__(self, settings_file: str = None):
        """Initialize settings with default values or from a settings file."""
        load_dotenv()
        self.settings_file = settings_file or os.environ.get("SPP_SETTINGS_FILE", "spp_settings.json")
        self.settings = self.DEFAULT_SETTINGS.copy()
        self.load_settings()

    def load_settings(self) -> None:
        """Load settings from the settings file if it exists."""
        try:
            if os.path.exists(self.settings_file):
                with open(self.settings_file, 'r', encoding='utf-8') as f:
                    loaded_settings = json.load(f)
                unknown = set(loaded_settings) - set(self.DEFAULT_SETTINGS)
                if unknown:
                    error_handler.log_warning(f"ignoring unknown keys {sorted(unknown)}", "Settings")
                self.settings.update({k: v for k, v in loaded_settings.items() if k in self.DEFAULT_SETTINGS})
                error_handler.log_debug(f"loaded from {self.settings_file}", "Settings")
        except Exception as e:
            error_handler.log_warning(f"could not load {self.settings_file}: {e}", "Settings")

    def save_settings(self) -> None:
        """Save current settings to the settings file."""
        try:
            with open(self.settings_file, 'w', encoding='utf-8') as f:
                json.dump(self.settings, f, indent=4, sort_keys=True)
            error_handler.log_debug(f"saved to {self.settings_file}", "Settings")
        except Exception as e:
            error_handler.log_warning(f"could not save {self.settings_file}: {e}", "Settings")

    def get(self, key: str, default: Any = None) -> Any:
        """Get a setting value by key, with optional default."""
        return self.settings.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Set a setting value by key."""
        self.settings[key] = value

    def update(self, updates: Dict[str, Any]) -> None:
        """Update multiple settings at once."""
        self.settings.update(updates)

    def get_all(self) -> Dict[str, Any]:
        """Get all settings as a dictionary."""
        return self.settings.copy()


settings = Settings()
