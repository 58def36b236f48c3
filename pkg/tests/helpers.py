"""Shared fixtures: bundled data paths and scripted pipeline builders."""
from importlib import resources

DATA = resources.files("handwave").joinpath("data")
FOX_SCRIPT_PATH = str(DATA / "fox.script")
KEYBOARD_XML_PATH = str(DATA / "keyboard.xml")
MOUSEPAD_XML_PATH = str(DATA / "mousepad.xml")


def keyboard_xml() -> str:
    return DATA.joinpath("keyboard.xml").read_text()


def mousepad_xml() -> str:
    return DATA.joinpath("mousepad.xml").read_text()
