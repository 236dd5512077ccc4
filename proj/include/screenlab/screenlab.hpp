#pragma once

// Umbrella header: the whole library.

#include "screenlab/bayes.hpp"
#include "screenlab/dynamics.hpp"
#include "screenlab/errors.hpp"
#include "screenlab/io.hpp"
#include "screenlab/oracle.hpp"
#include "screenlab/serial.hpp"
#include "screenlab/version.hpp"
