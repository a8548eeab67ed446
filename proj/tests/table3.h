#ifndef RSE_TESTS_TABLE3_H_
#define RSE_TESTS_TABLE3_H_

#include <array>

namespace rse::testing {

// SEM vs RSE under PWWS, reference percentages: before-attack accuracy,
// after-attack accuracy, accuracy shift and attack-success rate.
struct Table3Row {
  const char* dataset;
  const char* model;
  const char* defense;
  double before;
  double after;
  double shift;
  double success_rate;
};

inline constexpr std::array<Table3Row, 18> kTable3 = {{
    {"IMDB", "LSTM", "SEM", 86.8, 77.3, 9.5, 10.94},
    {"IMDB", "LSTM", "RSE", 87.0, 82.2, 4.8, 5.52},
    {"IMDB", "Bi-LSTM", "SEM", 87.6, 76.1, 11.5, 13.13},
    {"IMDB", "Bi-LSTM", "RSE", 86.5, 79.3, 7.2, 8.32},
    {"IMDB", "Word-CNN", "SEM", 86.8, 71.1, 15.7, 18.09},
    {"IMDB", "Word-CNN", "RSE", 87.8, 81.2, 6.6, 7.52},
    {"AG", "LSTM", "SEM", 90.9, 85.0, 5.9, 6.49},
    {"AG", "LSTM", "RSE", 92.9, 84.2, 8.7, 9.36},
    {"AG", "Bi-LSTM", "SEM", 90.1, 81.1, 9.0, 9.99},
    {"AG", "Bi-LSTM", "RSE", 94.1, 88.3, 5.8, 6.16},
    {"AG", "Word-CNN", "SEM", 88.7, 67.6, 21.1, 23.79},
    {"AG", "Word-CNN", "RSE", 94.8, 89.9, 4.9, 5.17},
    {"Yahoo", "LSTM", "SEM", 69.0, 54.9, 14.1, 20.43},
    {"Yahoo", "LSTM", "RSE", 72.1, 64.3, 7.8, 10.82},
    {"Yahoo", "Bi-LSTM", "SEM", 70.2, 57.2, 13.0, 18.52},
    {"Yahoo", "Bi-LSTM", "RSE", 71.8, 64.6, 7.2, 10.03},
    {"Yahoo", "Word-CNN", "SEM", 65.8, 52.6, 13.2, 20.06},
    {"Yahoo", "Word-CNN", "RSE", 70.1, 62.6, 7.5, 10.70},
}};

}  // namespace rse::testing

#endif  // RSE_TESTS_TABLE3_H_
