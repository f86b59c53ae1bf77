#pragma once

#define COXREG_VERSION "0.1.0"
