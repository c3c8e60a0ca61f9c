from .config import Settings, get_settings, load_settings
from .errors import InvlabError
