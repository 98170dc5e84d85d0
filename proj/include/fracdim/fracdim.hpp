#pragma once

#include "fracdim/common.hpp"
#include "fracdim/distance.hpp"
#include "fracdim/estimators.hpp"
#include "fracdim/ifs.hpp"
#include "fracdim/image.hpp"
#include "fracdim/lab.hpp"
#include "fracdim/linalg.hpp"
#include "fracdim/minkowski.hpp"
#include "fracdim/periodogram.hpp"
#include "fracdim/rasterize.hpp"
#include "fracdim/report.hpp"
#include "fracdim/schedule.hpp"
#include "fracdim/series.hpp"
