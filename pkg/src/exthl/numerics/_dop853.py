"""Dormand-Prince 8(5,3) tableau (Hairer, Norsett & Wanner) with the 7th-order dense output."""
import numpy as np

N_STAGES = 12
N_STAGES_EXTENDED = 16
INTERPOLATOR_POWER = 7

C = np.array([
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
    1.0,
    0.1,
    0.2,
    0.7777777777777778,
])

A = np.zeros((N_STAGES_EXTENDED, N_STAGES_EXTENDED))
A[1, 0] = 0.05260015195876773
A[2, 0] = 0.0197250569845379
A[2, 1] = 0.0591751709536137
A[3, 0] = 0.02958758547680685
A[3, 2] = 0.08876275643042054
A[4, 0] = 0.2413651341592667
A[4, 2] = -0.8845494793282861
A[4, 3] = 0.924834003261792
A[5, 0] = 0.037037037037037035
A[5, 3] = 0.17082860872947386
A[5, 4] = 0.12546768756682242
A[6, 0] = 0.037109375
A[6, 3] = 0.17025221101954405
A[6, 4] = 0.06021653898045596
A[6, 5] = -0.017578125
A[7, 0] = 0.03709200011850479
A[7, 3] = 0.17038392571223998
A[7, 4] = 0.10726203044637328
A[7, 5] = -0.015319437748624402
A[7, 6] = 0.008273789163814023
A[8, 0] = 0.6241109587160757
A[8, 3] = -3.3608926294469414
A[8, 4] = -0.868219346841726
A[8, 5] = 27.59209969944671
A[8, 6] = 20.154067550477894
A[8, 7] = -43.48988418106996
A[9, 0] = 0.47766253643826434
A[9, 3] = -2.4881146199716677
A[9, 4] = -0.590290826836843
A[9, 5] = 21.230051448181193
A[9, 6] = 15.279233632882423
A[9, 7] = -33.28821096898486
A[9, 8] = -0.020331201708508627
A[10, 0] = -0.9371424300859873
A[10, 3] = 5.186372428844064
A[10, 4] = 1.0914373489967295
A[10, 5] = -8.149787010746927
A[10, 6] = -18.52006565999696
A[10, 7] = 22.739487099350505
A[10, 8] = 2.4936055526796523
A[10, 9] = -3.0467644718982196
A[11, 0] = 2.273310147516538
A[11, 3] = -10.53449546673725
A[11, 4] = -2.0008720582248625
A[11, 5] = -17.9589318631188
A[11, 6] = 27.94888452941996
A[11, 7] = -2.8589982771350235
A[11, 8] = -8.87285693353063
A[11, 9] = 12.360567175794303
A[11, 10] = 0.6433927460157636
A[12, 0] = 0.054293734116568765
A[12, 5] = 4.450312892752409
A[12, 6] = 1.8915178993145003
A[12, 7] = -5.801203960010585
A[12, 8] = 0.3111643669578199
A[12, 9] = -0.1521609496625161
A[12, 10] = 0.20136540080403034
A[12, 11] = 0.04471061572777259
A[13, 0] = 0.056167502283047954
A[13, 6] = 0.25350021021662483
A[13, 7] = -0.2462390374708025
A[13, 8] = -0.12419142326381637
A[13, 9] = 0.15329179827876568
A[13, 10] = 0.00820105229563469
A[13, 11] = 0.007567897660545699
A[13, 12] = -0.008298
A[14, 0] = 0.03183464816350214
A[14, 5] = 0.028300909672366776
A[14, 6] = 0.053541988307438566
A[14, 7] = -0.05492374857139099
A[14, 10] = -0.00010834732869724932
A[14, 11] = 0.0003825710908356584
A[14, 12] = -0.00034046500868740456
A[14, 13] = 0.1413124436746325
A[15, 0] = -0.42889630158379194
A[15, 5] = -4.697621415361164
A[15, 6] = 7.683421196062599
A[15, 7] = 4.06898981839711
A[15, 8] = 0.3567271874552811
A[15, 12] = -0.0013990241651590145
A[15, 13] = 2.9475147891527724
A[15, 14] = -9.15095847217987

B = A[N_STAGES, :N_STAGES]

# 5th-order embedded error weights (length N_STAGES + 1, last entry multiplies f(t+h, y_new))
E5 = np.array([
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
    0.0,
])

D = np.zeros((INTERPOLATOR_POWER - 3, N_STAGES_EXTENDED))
D[0, 0] = -8.428938276109013
D[0, 5] = 0.5667149535193777
D[0, 6] = -3.0689499459498917
D[0, 7] = 2.38466765651207
D[0, 8] = 2.117034582445028
D[0, 9] = -0.871391583777973
D[0, 10] = 2.2404374302607883
D[0, 11] = 0.6315787787694688
D[0, 12] = -0.08899033645133331
D[0, 13] = 18.148505520854727
D[0, 14] = -9.194632392478356
D[0, 15] = -4.436036387594894
D[1, 0] = 10.427508642579134
D[1, 5] = 242.28349177525817
D[1, 6] = 165.20045171727028
D[1, 7] = -374.5467547226902
D[1, 8] = -22.113666853125306
D[1, 9] = 7.733432668472264
D[1, 10] = -30.674084731089398
D[1, 11] = -9.332130526430229
D[1, 12] = 15.697238121770845
D[1, 13] = -31.139403219565178
D[1, 14] = -9.35292435884448
D[1, 15] = 35.81684148639408
D[2, 0] = 19.985053242002433
D[2, 5] = -387.0373087493518
D[2, 6] = -189.17813819516758
D[2, 7] = 527.8081592054236
D[2, 8] = -11.57390253995963
D[2, 9] = 6.8812326946963
D[2, 10] = -1.0006050966910838
D[2, 11] = 0.7777137798053443
D[2, 12] = -2.778205752353508
D[2, 13] = -60.19669523126412
D[2, 14] = 84.32040550667716
D[2, 15] = 11.99229113618279
D[3, 0] = -25.69393346270375
D[3, 5] = -154.18974869023643
D[3, 6] = -231.5293791760455
D[3, 7] = 357.6391179106141
D[3, 8] = 93.40532418362432
D[3, 9] = -37.45832313645163
D[3, 10] = 104.0996495089623
D[3, 11] = 29.8402934266605
D[3, 12] = -43.53345659001114
D[3, 13] = 96.32455395918828
D[3, 14] = -39.17726167561544
D[3, 15] = -149.72683625798564
