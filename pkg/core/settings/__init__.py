from core.settings.env_config import Settings, get_settings

__all__ = ["Settings", "get_settings"]
