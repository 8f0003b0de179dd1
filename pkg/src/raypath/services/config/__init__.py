from .config import Config, DEFAULT_CONFIG_PATH
from .settings import MatchSettings, FitSettings, DEFAULT_MATCH_SETTINGS, DEFAULT_FIT_SETTINGS
