from .config import Settings, get_settings
