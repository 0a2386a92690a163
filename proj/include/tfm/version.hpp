#pragma once

#define TFM_VERSION "0.1.0"
