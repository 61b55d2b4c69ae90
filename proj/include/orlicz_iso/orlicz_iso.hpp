#pragma once

#include "orlicz_iso/certificate.hpp"
#include "orlicz_iso/error.hpp"
#include "orlicz_iso/fixtures.hpp"
#include "orlicz_iso/grid.hpp"
#include "orlicz_iso/isotone.hpp"
#include "orlicz_iso/luxemburg_fit.hpp"
#include "orlicz_iso/orlicz.hpp"
#include "orlicz_iso/reference.hpp"
