#pragma once

#include <array>

// Reference values computed outside the library.
namespace smaup::testing {

// Critical-value table as published: rho, alpha, then N = 25, 100, 225,
// 400, 625, 900. Copied from the source text, not from the library.
struct PublishedRow {
  double rho;
  double alpha;
  std::array<double, 6> values;
};

inline constexpr std::array<int, 6> kPublishedAreas{25, 100, 225, 400, 625, 900};

inline constexpr std::array<PublishedRow, 27> kPublishedCriticalValues{{
    {-0.9, 0.01, {0.83702, 0.09218, 0.23808, 0.05488, 0.07218, 0.02621}},
    {-0.9, 0.05, {0.83699, 0.08023, 0.10962, 0.04894, 0.04641, 0.02423}},
    {-0.9, 0.1, {0.69331, 0.06545, 0.07858, 0.04015, 0.03374, 0.02187}},
    {-0.7, 0.01, {0.83676, 0.16134, 0.13402, 0.06737, 0.05486, 0.02858}},
    {-0.7, 0.05, {0.83662, 0.12492, 0.08643, 0.05900, 0.04280, 0.02459}},
    {-0.7, 0.1, {0.79421, 0.09566, 0.06777, 0.05058, 0.03392, 0.02272}},
    {-0.5, 0.01, {0.83597, 0.16524, 0.13446, 0.06616, 0.06247, 0.02851}},
    {-0.5, 0.05, {0.83578, 0.13796, 0.08679, 0.05927, 0.04260, 0.02658}},
    {-0.5, 0.1, {0.68900, 0.10707, 0.07039, 0.05151, 0.03609, 0.02411}},
    {-0.3, 0.01, {0.83316, 0.19276, 0.13396, 0.06330, 0.06090, 0.03696}},
    {-0.3, 0.05, {0.78849, 0.16932, 0.08775, 0.05464, 0.04787, 0.03042}},
    {-0.3, 0.1, {0.73592, 0.14282, 0.07076, 0.04649, 0.04001, 0.02614}},
    {0.0, 0.01, {0.82370, 0.17925, 0.15514, 0.07732, 0.07988, 0.09301}},
    {0.0, 0.05, {0.81952, 0.15746, 0.11126, 0.06961, 0.06066, 0.05234}},
    {0.0, 0.1, {0.71632, 0.13621, 0.08801, 0.06112, 0.04937, 0.03759}},
    {0.3, 0.01, {0.76472, 0.23404, 0.24640, 0.11588, 0.10715, 0.07070}},
    {0.3, 0.05, {0.70466, 0.21088, 0.15360, 0.09766, 0.07938, 0.06461}},
    {0.3, 0.1, {0.63718, 0.18239, 0.12101, 0.08324, 0.06347, 0.05549}},
    {0.5, 0.01, {0.67337, 0.28921, 0.25535, 0.13992, 0.12975, 0.09856}},
    {0.5, 0.05, {0.59461, 0.23497, 0.18244, 0.11682, 0.10129, 0.08860}},
    {0.5, 0.1, {0.46548, 0.17541, 0.14248, 0.10008, 0.08137, 0.07701}},
    {0.7, 0.01, {0.52155, 0.47399, 0.29351, 0.23923, 0.20321, 0.16250}},
    {0.7, 0.05, {0.48958, 0.37226, 0.22280, 0.20540, 0.16144, 0.14123}},
    {0.7, 0.1, {0.34720, 0.28774, 0.18170, 0.16442, 0.13395, 0.12354}},
    {0.9, 0.01, {0.28599, 0.28938, 0.43520, 0.44060, 0.34437, 0.55967}},
    {0.9, 0.05, {0.21580, 0.22532, 0.27122, 0.29043, 0.23648, 0.31424}},
    {0.9, 0.1, {0.17640, 0.18835, 0.21695, 0.23031, 0.19435, 0.22411}},
}};

// M(rho, theta) at 40 significant digits (tests/oracles/smaup_scalar_oracle.py).
struct MGridPoint {
  double rho;
  double theta;
  double m;
};

inline constexpr std::array<MGridPoint, 25> kMGrid{{
    {-0.9, 0.1, 0.81501368398029313392}, {-0.9, 0.3, 0.51755945663611500201},
    {-0.9, 0.5, 0.20521256149992131697}, {-0.9, 0.7, 0.056043451733510299668},
    {-0.9, 0.9, 0.011770258181245365846}, {-0.5, 0.1, 0.81331157308332619608},
    {-0.5, 0.3, 0.5106858106394232831},  {-0.5, 0.5, 0.19789737942101924121},
    {-0.5, 0.7, 0.052680559336357602453}, {-0.5, 0.9, 0.011357833282266936067},
    {0.0, 0.1, 0.79414977980485658963},  {0.0, 0.3, 0.46834657019810911428},
    {0.0, 0.5, 0.17299254051687076835},  {0.0, 0.7, 0.046011545846849545348},
    {0.0, 0.9, 0.010805999359927797464}, {0.5, 0.1, 0.63263486226525722245},
    {0.5, 0.3, 0.30879813389998165114},  {0.5, 0.5, 0.11921921823031883994},
    {0.5, 0.7, 0.036489951008782499229}, {0.5, 0.9, 0.010217519158168944459},
    {0.9, 0.1, 0.27705039121088461472},  {0.9, 0.3, 0.13151225725882216126},
    {0.9, 0.5, 0.06751115300698399439},  {0.9, 0.7, 0.027749762104203722471},
    {0.9, 0.9, 0.0097240047928640431152},
}};

inline constexpr double kL0 = 0.89916671928361844779;
inline constexpr double kL04 = 0.34878140272766264748;
inline constexpr double kL01 = 0.81531155621562058527;
inline constexpr double kEta05 = 0.21145798877047941732;
inline constexpr double kTauZero = 0.96149674620390455531;
inline constexpr double kMTheta1Rho0 = 0.0051594373596679357788;

}  // namespace smaup::testing
