// SPDX-License-Identifier: Apache-2.0
//
// fimsense: waveform and surface-shape design for flexible-metasurface MIMO sensing
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fimsense
{

inline constexpr double speed_of_light = 299792458.0; // m/s

// Zero linear power maps to this floor so that dBm outputs stay finite.
inline constexpr double dbm_floor = -200.0;

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw)
{
    if (!(mw > 0.0))
        return dbm_floor;
    return std::max(10.0 * std::log10(mw), dbm_floor);
}

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline double wavelength_from_frequency(double frequency_hz) { return speed_of_light / frequency_hz; }

} // namespace fimsense
