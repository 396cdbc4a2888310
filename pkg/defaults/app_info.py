# -*- coding: utf-8 -*-
"""
Module: app_info.py
Author: Takeshi
Date: 2026-02-16

Description:
    应用信息
"""


class AppInfo:
    """应用信息类，依赖版本见 requirements.txt"""

    NAME = "ForkJoinExtremes"
    DESCRIPTION = "fork-join 队列最大等待时间与最大队列长度的极限分布计算和蒙特卡洛校验"
    VERSION = "1.0.0"

    @classmethod
    def version_string(cls) -> str:
        """--version 输出"""
        return f"{cls.NAME} {cls.VERSION}"
